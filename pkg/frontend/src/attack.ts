/** Attack-curve computation: best collective attack per acceptance level. */

import {
  evaluateFunctional,
  honestStrategy,
  KeyMatchFunctionals,
  keyMatchFunctionals,
  loadFixture,
  ModelData,
} from "./model.js";
import {
  functionalToVector,
  SdpResult,
  solveSdp,
  strategyToVector,
  vectorToStrategy,
} from "./sdp.js";

export interface AttackModel {
  data: ModelData;
  functionals: KeyMatchFunctionals;
  abVector: number[];
  eveVectors: { A: number[]; B: number[] };
  honestCompliance: number; // (2 + sqrt 2)/4 up to numerics
  depolarizedCompliance: number;
}

export interface AttackCurvePoint {
  q: number;
  eveValue: number;
  abValue: number;
  status: string;
}

export function buildModel(fixturePath: string): AttackModel {
  const data = loadFixture(fixturePath);
  const functionals = keyMatchFunctionals(data);
  const honest = evaluateFunctional(functionals.abMatch, honestStrategy(0));
  const depolarized = evaluateFunctional(functionals.abMatch, honestStrategy(1));
  return {
    data,
    functionals,
    abVector: functionalToVector(functionals.abMatch),
    eveVectors: {
      A: functionalToVector(functionals.eveMatchA),
      B: functionalToVector(functionals.eveMatchB),
    },
    honestCompliance: honest,
    depolarizedCompliance: depolarized,
  };
}

function feasibleStart(model: AttackModel, q: number): number[] {
  // mix the honest relay with depolarizing noise; keep half the compliance slack
  const drop = model.honestCompliance - model.depolarizedCompliance;
  const eta = Math.min(0.9, Math.max(1e-6, (model.honestCompliance - q) / (2 * drop)));
  return strategyToVector(honestStrategy(eta));
}

export function solveAttack(model: AttackModel, q: number, target: "A" | "B"): SdpResult {
  return solveSdp({
    objective: model.eveVectors[target],
    ineq: model.abVector,
    rhs: q,
    x0: feasibleStart(model, q),
  });
}

export function attackPoint(model: AttackModel, q: number): AttackCurvePoint {
  if (q >= model.honestCompliance - 1e-9) {
    return { q, eveValue: NaN, abValue: NaN, status: "infeasible" };
  }
  const a = solveAttack(model, q, "A");
  const b = solveAttack(model, q, "B");
  if (a.status !== "optimal" || b.status !== "optimal") {
    return { q, eveValue: NaN, abValue: NaN, status: "numerical" };
  }
  const best = a.value >= b.value ? a : b;
  const strategy = vectorToStrategy(best.x);
  return {
    q,
    eveValue: best.value,
    abValue: evaluateFunctional(model.functionals.abMatch, strategy),
    status: "optimal",
  };
}

export function sweep(model: AttackModel, grid: number[]): AttackCurvePoint[] {
  return grid
    .slice()
    .sort((x, y) => x - y)
    .map((q) => attackPoint(model, q));
}

/**
 * The acceptance level where the eavesdropper's curve meets the diagonal:
 * below it she matches a key at least as often as the honest parties match
 * each other.  Bisection on the sign of eve(Q) - Q.
 */
export function findIntersection(
  model: AttackModel,
  lo = 0.55,
  hi = 0.85,
  iterations = 18
): number | null {
  let fLo = attackPoint(model, lo);
  let fHi = attackPoint(model, hi);
  if (fLo.status !== "optimal" || fHi.status !== "optimal") return null;
  let gLo = fLo.eveValue - lo;
  let gHi = fHi.eveValue - hi;
  if (gLo <= 0 || gHi >= 0) return null;
  let a = lo;
  let b = hi;
  for (let i = 0; i < iterations; i++) {
    const mid = (a + b) / 2;
    const point = attackPoint(model, mid);
    if (point.status !== "optimal") return null;
    if (point.eveValue - mid > 0) a = mid;
    else b = mid;
  }
  return (a + b) / 2;
}

export function toCsv(points: AttackCurvePoint[], comments: string[] = []): string {
  const lines = comments.map((c) => `# ${c}`);
  lines.push("Q,eve_value,ab_value,status");
  for (const p of points) {
    const eve = Number.isNaN(p.eveValue) ? "nan" : p.eveValue.toFixed(6);
    const ab = Number.isNaN(p.abValue) ? "nan" : p.abValue.toFixed(6);
    lines.push(`${p.q.toFixed(6)},${eve},${ab},${p.status}`);
  }
  return lines.join("\n") + "\n";
}
