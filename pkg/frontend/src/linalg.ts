/** Small dense linear-algebra helpers (row-major number[][]). */

export type Mat = number[][];

export function zeros(rows: number, cols: number): Mat {
  return Array.from({ length: rows }, () => new Array<number>(cols).fill(0));
}

export function eye(n: number): Mat {
  const out = zeros(n, n);
  for (let i = 0; i < n; i++) out[i][i] = 1;
  return out;
}

export function clone(a: Mat): Mat {
  return a.map((row) => row.slice());
}

export function transpose(a: Mat): Mat {
  const out = zeros(a[0].length, a.length);
  for (let i = 0; i < a.length; i++)
    for (let j = 0; j < a[0].length; j++) out[j][i] = a[i][j];
  return out;
}

export function matMul(a: Mat, b: Mat): Mat {
  const n = a.length,
    k = b.length,
    m = b[0].length;
  const out = zeros(n, m);
  for (let i = 0; i < n; i++) {
    for (let l = 0; l < k; l++) {
      const v = a[i][l];
      if (v === 0) continue;
      const brow = b[l];
      const orow = out[i];
      for (let j = 0; j < m; j++) orow[j] += v * brow[j];
    }
  }
  return out;
}

export function matVec(a: Mat, x: number[]): number[] {
  return a.map((row) => row.reduce((acc, v, j) => acc + v * x[j], 0));
}

export function dot(a: number[], b: number[]): number {
  let acc = 0;
  for (let i = 0; i < a.length; i++) acc += a[i] * b[i];
  return acc;
}

export function add(a: Mat, b: Mat, scale = 1): Mat {
  return a.map((row, i) => row.map((v, j) => v + scale * b[i][j]));
}

export function scale(a: Mat, s: number): Mat {
  return a.map((row) => row.map((v) => v * s));
}

export function kron(a: Mat, b: Mat): Mat {
  const out = zeros(a.length * b.length, a[0].length * b[0].length);
  for (let i = 0; i < a.length; i++)
    for (let j = 0; j < a[0].length; j++) {
      const v = a[i][j];
      if (v === 0) continue;
      for (let k = 0; k < b.length; k++)
        for (let l = 0; l < b[0].length; l++)
          out[i * b.length + k][j * b[0].length + l] = v * b[k][l];
    }
  return out;
}

export function traceProduct(a: Mat, b: Mat): number {
  // tr(a b)
  let acc = 0;
  for (let i = 0; i < a.length; i++)
    for (let j = 0; j < a[0].length; j++) acc += a[i][j] * b[j][i];
  return acc;
}

/** Cholesky factor of a symmetric positive-definite matrix, or null. */
export function cholesky(a: Mat): Mat | null {
  const n = a.length;
  const l = zeros(n, n);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j <= i; j++) {
      let s = a[i][j];
      for (let k = 0; k < j; k++) s -= l[i][k] * l[j][k];
      if (i === j) {
        if (s <= 0 || !Number.isFinite(s)) return null;
        l[i][i] = Math.sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return l;
}

export function logDetFromCholesky(l: Mat): number {
  let acc = 0;
  for (let i = 0; i < l.length; i++) acc += Math.log(l[i][i]);
  return 2 * acc;
}

/** Solve A x = b for symmetric positive-definite A via Cholesky. */
export function solveSpd(a: Mat, b: number[]): number[] | null {
  const l = cholesky(a);
  if (l === null) return null;
  const n = a.length;
  const y = new Array<number>(n).fill(0);
  for (let i = 0; i < n; i++) {
    let s = b[i];
    for (let k = 0; k < i; k++) s -= l[i][k] * y[k];
    y[i] = s / l[i][i];
  }
  const x = new Array<number>(n).fill(0);
  for (let i = n - 1; i >= 0; i--) {
    let s = y[i];
    for (let k = i + 1; k < n; k++) s -= l[k][i] * x[k];
    x[i] = s / l[i][i];
  }
  return x;
}

/** Symmetric inverse via Cholesky (small matrices only). */
export function invSpd(a: Mat): Mat | null {
  const n = a.length;
  const cols: number[][] = [];
  for (let j = 0; j < n; j++) {
    const e = new Array<number>(n).fill(0);
    e[j] = 1;
    const x = solveSpd(a, e);
    if (x === null) return null;
    cols.push(x);
  }
  return transpose(cols);
}

/** Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations. */
export function jacobiEigen(aIn: Mat, maxSweeps = 60): { values: number[]; vectors: Mat } {
  const n = aIn.length;
  const a = clone(aIn);
  const v = eye(n);
  for (let sweep = 0; sweep < maxSweeps; sweep++) {
    let off = 0;
    for (let p = 0; p < n; p++)
      for (let q = p + 1; q < n; q++) off += a[p][q] * a[p][q];
    if (off < 1e-26) break;
    for (let p = 0; p < n; p++) {
      for (let q = p + 1; q < n; q++) {
        if (Math.abs(a[p][q]) < 1e-300) continue;
        const theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const t = Math.sign(theta || 1) / (Math.abs(theta) + Math.sqrt(theta * theta + 1));
        const c = 1 / Math.sqrt(t * t + 1);
        const s = t * c;
        for (let k = 0; k < n; k++) {
          const akp = a[k][p],
            akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (let k = 0; k < n; k++) {
          const apk = a[p][k],
            aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (let k = 0; k < n; k++) {
          const vkp = v[k][p],
            vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  return { values: a.map((row, i) => row[i]), vectors: v };
}

/**
 * Orthonormal basis of the null space of A (rows x cols, independent rows),
 * via a full Householder QR of A^T: the trailing columns of Q.
 */
export function nullspaceBasis(aRows: Mat, tol = 1e-10): Mat {
  const at = transpose(aRows); // cols x rows
  const m = at.length;
  const n = at[0].length;
  const r = clone(at);
  const q = eye(m);
  for (let k = 0; k < Math.min(m - 1, n); k++) {
    let norm = 0;
    for (let i = k; i < m; i++) norm += r[i][k] * r[i][k];
    norm = Math.sqrt(norm);
    if (norm < 1e-300) continue;
    const alpha = r[k][k] >= 0 ? -norm : norm;
    const vvec = new Array<number>(m).fill(0);
    vvec[k] = r[k][k] - alpha;
    for (let i = k + 1; i < m; i++) vvec[i] = r[i][k];
    let vnorm2 = 0;
    for (let i = k; i < m; i++) vnorm2 += vvec[i] * vvec[i];
    if (vnorm2 < 1e-300) continue;
    // R <- (I - 2 v v^T / v^T v) R ; Q <- Q (I - 2 v v^T / v^T v)
    for (let j = 0; j < n; j++) {
      let s = 0;
      for (let i = k; i < m; i++) s += vvec[i] * r[i][j];
      s = (2 * s) / vnorm2;
      for (let i = k; i < m; i++) r[i][j] -= s * vvec[i];
    }
    for (let i = 0; i < m; i++) {
      let s = 0;
      for (let j = k; j < m; j++) s += q[i][j] * vvec[j];
      s = (2 * s) / vnorm2;
      for (let j = k; j < m; j++) q[i][j] -= s * vvec[j];
    }
  }
  // rank = number of nonzero diagonal entries of R
  let rank = 0;
  for (let k = 0; k < Math.min(m, n); k++) if (Math.abs(r[k][k]) > tol) rank++;
  const basis: Mat = [];
  for (let j = rank; j < m; j++) basis.push(q.map((row) => row[j]));
  return transpose(basis); // m x (m - rank): columns span null(A)
}
