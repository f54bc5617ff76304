/**
 * Problem data for the collective-attack optimization.
 *
 * The eavesdropper sits on the wire feeding the second lab's input.  Her whole
 * per-announcement strategy is a family of composite operators E[e][z][bp] on
 * (wire x relay), 4x4 real symmetric, obeying the network conditions:
 * positivity, an announcement-independent sum, and trace preservation.  The
 * formulation is ancilla-free and exact: any feasible family dilates to one
 * channel plus announcement-indexed measurements on a purifying ancilla.
 *
 * All fixed operators (the process matrix and both labs' instruments) come
 * from the fixture JSON exported by the primary package, which pins the
 * operator conventions; `gameValue(honest)` reproducing (2+sqrt 2)/4 is the
 * cross-check that both components agree.
 */

import { readFileSync } from "node:fs";

import { kron, Mat, traceProduct, zeros } from "./linalg.js";

export interface Fixture {
  format: string;
  game_success: number;
  wcns: SerializedOperator;
  alice: Record<string, SerializedOperator>;
  bob: Record<string, SerializedOperator>;
}

interface SerializedOperator {
  labels: string[];
  dims: number[];
  real: number[];
  imag: number[];
}

function toMatrix(op: SerializedOperator): Mat {
  const side = op.dims.reduce((a, b) => a * b, 1);
  const maxImag = op.imag.reduce((m, v) => Math.max(m, Math.abs(v)), 0);
  if (maxImag > 1e-12) {
    throw new Error(`fixture operator has imaginary entries (max ${maxImag})`);
  }
  const out = zeros(side, side);
  for (let i = 0; i < side; i++)
    for (let j = 0; j < side; j++) out[i][j] = op.real[i * side + j];
  return out;
}

export interface ModelData {
  process: Mat; // 16x16 on (A_I, A_O, wire, B_O)
  alice: Mat[][]; // [a][x] on (A_I, A_O)
  bob: Mat[][][]; // [b][bp][y] on (relay, B_O)
}

export function loadFixture(path: string): ModelData {
  const fixture = JSON.parse(readFileSync(path, "utf-8")) as Fixture;
  if (fixture.format !== "icoqkd-quantum-fixture-v1") {
    throw new Error(`unexpected fixture format ${fixture.format}`);
  }
  const alice: Mat[][] = [[], []];
  const bob: Mat[][][] = [
    [[], []],
    [[], []],
  ];
  for (let a = 0; a < 2; a++)
    for (let x = 0; x < 2; x++) alice[a][x] = toMatrix(fixture.alice[`a${a}_x${x}`]);
  for (let b = 0; b < 2; b++)
    for (let bp = 0; bp < 2; bp++)
      for (let y = 0; y < 2; y++)
        bob[b][bp][y] = toMatrix(fixture.bob[`b${b}_bp${bp}_y${y}`]);
  return { process: toMatrix(fixture.wcns), alice, bob };
}

/**
 * Contract an eavesdropper operator with one of Bob's instrument elements over
 * the relay subsystem (link composition; shared row pairs with shared row).
 * E lives on (wire, relay), B on (relay, B_O); the result lives on (wire, B_O).
 */
export function linkWithBob(e: Mat, bobOp: Mat): Mat {
  const out = zeros(4, 4);
  for (let w = 0; w < 2; w++)
    for (let o = 0; o < 2; o++)
      for (let wp = 0; wp < 2; wp++)
        for (let op = 0; op < 2; op++) {
          let acc = 0;
          for (let m = 0; m < 2; m++)
            for (let mp = 0; mp < 2; mp++)
              acc += e[w * 2 + m][wp * 2 + mp] * bobOp[m * 2 + o][mp * 2 + op];
          out[w * 2 + o][wp * 2 + op] = acc;
        }
  return out;
}

/** P(x, y, e | a, b, bp) for an explicit strategy (e picks the operator). */
export function jointProbability(
  data: ModelData,
  strategy: Mat[][][],
  a: number,
  b: number,
  bp: number,
  x: number,
  y: number,
  e: number
): number {
  const z = ((1 - bp) * y) ^ b;
  const linked = linkWithBob(strategy[e][z][bp], data.bob[b][bp][y]);
  return traceProduct(data.process, kron(data.alice[a][x], linked));
}

/**
 * Coefficient matrices G[a][x][b][y][bp] with
 * P(x,y,e|a,b,bp) = <E[e][z][bp], G[a][x][b][y][bp]>_F, z = (1-bp)y xor b.
 */
export function probeCoefficients(data: ModelData): Mat[][][][][] {
  const out: Mat[][][][][] = [];
  for (let a = 0; a < 2; a++) {
    out.push([]);
    for (let x = 0; x < 2; x++) {
      out[a].push([]);
      for (let b = 0; b < 2; b++) {
        out[a][x].push([]);
        for (let y = 0; y < 2; y++) {
          out[a][x][b].push([]);
          for (let bp = 0; bp < 2; bp++) {
            const g = zeros(4, 4);
            for (let r = 0; r < 4; r++)
              for (let c = 0; c < 4; c++) {
                const unit = zeros(4, 4);
                unit[r][c] = 1;
                const linked = linkWithBob(unit, data.bob[b][bp][y]);
                g[r][c] = traceProduct(
                  data.process,
                  kron(data.alice[a][x], linked)
                );
              }
            // only the symmetric part matters against symmetric E
            const gs = zeros(4, 4);
            for (let r = 0; r < 4; r++)
              for (let c = 0; c < 4; c++) gs[r][c] = (g[r][c] + g[c][r]) / 2;
            out[a][x][b][y].push(gs);
          }
        }
      }
    }
  }
  return out;
}

/** A linear functional on the eight strategy blocks: one 4x4 per (e, z, bp). */
export type Functional = Mat[][][]; // [e][z][bp]

function emptyFunctional(): Functional {
  return Array.from({ length: 2 }, () =>
    Array.from({ length: 2 }, () => [zeros(4, 4), zeros(4, 4)])
  );
}

function accumulate(f: Functional, e: number, z: number, bp: number, g: Mat, w: number) {
  for (let r = 0; r < 4; r++)
    for (let c = 0; c < 4; c++) f[e][z][bp][r][c] += w * g[r][c];
}

export interface KeyMatchFunctionals {
  abMatch: Functional; // P(K_A = K_B)
  eveMatchA: Functional; // P(K_E = K_A)
  eveMatchB: Functional; // P(K_E = K_B)
  normalization: Functional; // sums P over x, y, e and averages over (a, b, bp)
}

export function keyMatchFunctionals(data: ModelData): KeyMatchFunctionals {
  const g = probeCoefficients(data);
  const abMatch = emptyFunctional();
  const eveMatchA = emptyFunctional();
  const eveMatchB = emptyFunctional();
  const normalization = emptyFunctional();
  const w = 1 / 8;
  for (let a = 0; a < 2; a++)
    for (let b = 0; b < 2; b++) {
      // direction bp = 0: K_A = x, K_B = b, announcement z = y xor b
      for (let x = 0; x < 2; x++)
        for (let y = 0; y < 2; y++) {
          const z = y ^ b;
          const coeff = g[a][x][b][y][0];
          for (let e = 0; e < 2; e++) {
            if (x === b) accumulate(abMatch, e, z, 0, coeff, w);
            accumulate(normalization, e, z, 0, coeff, w);
          }
          accumulate(eveMatchA, x, z, 0, coeff, w); // e = x
          accumulate(eveMatchB, b, z, 0, coeff, w); // e = b
        }
      // direction bp = 1: K_A = a, K_B = y, announcement z = b
      for (let x = 0; x < 2; x++)
        for (let y = 0; y < 2; y++) {
          const coeff = g[a][x][b][y][1];
          for (let e = 0; e < 2; e++) {
            if (y === a) accumulate(abMatch, e, b, 1, coeff, w);
            accumulate(normalization, e, b, 1, coeff, w);
          }
          accumulate(eveMatchA, a, b, 1, coeff, w); // e = a
          accumulate(eveMatchB, y, b, 1, coeff, w); // e = y
        }
    }
  return { abMatch, eveMatchA, eveMatchB, normalization };
}

export function evaluateFunctional(f: Functional, strategy: Mat[][][]): number {
  let acc = 0;
  for (let e = 0; e < 2; e++)
    for (let z = 0; z < 2; z++)
      for (let bp = 0; bp < 2; bp++)
        for (let r = 0; r < 4; r++)
          for (let c = 0; c < 4; c++)
            acc += f[e][z][bp][r][c] * strategy[e][z][bp][r][c];
  return acc;
}

/** The non-interfering strategy: pass the wire through, flip a fair coin for e. */
export function honestStrategy(eta = 0): Mat[][][] {
  const phi = zeros(4, 4); // relays the wire exactly
  for (let i = 0; i < 2; i++)
    for (let j = 0; j < 2; j++) phi[i * 2 + i][j * 2 + j] = 1;
  const block = zeros(4, 4);
  for (let r = 0; r < 4; r++)
    for (let c = 0; c < 4; c++)
      block[r][c] = 0.5 * ((1 - eta) * phi[r][c] + (r === c ? eta / 2 : 0));
  return Array.from({ length: 2 }, () =>
    Array.from({ length: 2 }, () => [block.map((r) => r.slice()), block.map((r) => r.slice())])
  );
}

/** Measure the wire in the computational basis, resend the outcome, output it. */
export function interceptResendStrategy(): Mat[][][] {
  const make = (e: number) => {
    const m = zeros(4, 4);
    m[e * 2 + e][e * 2 + e] = 1;
    return m;
  };
  return Array.from({ length: 2 }, (_, e) =>
    Array.from({ length: 2 }, () => [make(e), make(e)])
  );
}
