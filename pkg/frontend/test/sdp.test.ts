import { describe, expect, it } from "vitest";

import { dot, matVec } from "../src/linalg.js";
import { honestStrategy, keyMatchFunctionals, loadFixture } from "../src/model.js";
import {
  equalityConstraints,
  functionalToVector,
  NUM_VARS,
  solveSdp,
  strategyToVector,
  svec4,
  unsvec4,
} from "../src/sdp.js";

const data = loadFixture("fixtures/quantum_fixture.json");
const functionals = keyMatchFunctionals(data);
const OPTIMUM = (2 + Math.SQRT2) / 4;

describe("svec", () => {
  it("round-trips and preserves Frobenius inner products", () => {
    const a = [
      [1, 0.5, -0.25, 0],
      [0.5, 2, 0.75, -1],
      [-0.25, 0.75, 3, 0.1],
      [0, -1, 0.1, 4],
    ];
    const b = [
      [0.3, -0.2, 0, 1],
      [-0.2, 1.1, 0.4, 0],
      [0, 0.4, -0.6, 0.2],
      [1, 0, 0.2, 0.9],
    ];
    const back = unsvec4(svec4(a));
    for (let i = 0; i < 4; i++)
      for (let j = 0; j < 4; j++) expect(back[i][j]).toBeCloseTo(a[i][j], 12);
    let frob = 0;
    for (let i = 0; i < 4; i++)
      for (let j = 0; j < 4; j++) frob += a[i][j] * b[i][j];
    expect(dot(svec4(a), svec4(b))).toBeCloseTo(frob, 12);
  });
});

describe("network-condition constraints", () => {
  const { aeq, beq } = equalityConstraints();

  it("has 33 rows over 80 variables", () => {
    expect(aeq.length).toBe(33);
    expect(aeq[0].length).toBe(NUM_VARS);
  });

  it("is satisfied by relaying strategies", () => {
    for (const eta of [0, 0.4, 1]) {
      const x = strategyToVector(honestStrategy(eta));
      const resid = matVec(aeq, x).map((v, i) => v - beq[i]);
      for (const r of resid) expect(Math.abs(r)).toBeLessThan(1e-12);
    }
  });

  it("rejects a non-trace-preserving family", () => {
    const strategy = honestStrategy(0);
    for (let e = 0; e < 2; e++) strategy[e][0][0][0][0] += 0.25;
    const x = strategyToVector(strategy);
    const resid = matVec(aeq, x).map((v, i) => v - beq[i]);
    expect(Math.max(...resid.map(Math.abs))).toBeGreaterThan(0.1);
  });
});

describe("solver", () => {
  it("maximizing the parties' compliance recovers the game optimum", () => {
    // self-calibration: no feasible strategy beats the undisturbed process
    const ab = functionalToVector(functionals.abMatch);
    const result = solveSdp({
      objective: ab,
      ineq: ab,
      rhs: 0.5,
      x0: strategyToVector(honestStrategy(0.4)),
    });
    expect(result.status).toBe("optimal");
    expect(result.value).toBeCloseTo(OPTIMUM, 5);
  });

  it("flags infeasible starts", () => {
    const ab = functionalToVector(functionals.abMatch);
    const result = solveSdp({
      objective: ab,
      ineq: ab,
      rhs: 0.9, // above the reachable compliance
      x0: strategyToVector(honestStrategy(0.4)),
    });
    expect(result.status).not.toBe("optimal");
  });
});
