import { describe, expect, it } from "vitest";

import { kron, traceProduct, zeros } from "../src/linalg.js";
import {
  evaluateFunctional,
  honestStrategy,
  interceptResendStrategy,
  jointProbability,
  keyMatchFunctionals,
  loadFixture,
} from "../src/model.js";

const OPTIMUM = (2 + Math.SQRT2) / 4;
const data = loadFixture("fixtures/quantum_fixture.json");
const functionals = keyMatchFunctionals(data);

describe("fixture ingestion", () => {
  it("loads real square operators of the right sizes", () => {
    expect(data.process.length).toBe(16);
    expect(data.alice[0][1].length).toBe(4);
    expect(data.bob[1][0][1].length).toBe(4);
  });
});

describe("non-interfering strategy", () => {
  it("reproduces the undisturbed compliance", () => {
    const value = evaluateFunctional(functionals.abMatch, honestStrategy(0));
    expect(value).toBeCloseTo(OPTIMUM, 10);
  });

  it("gives the eavesdropper a fair coin", () => {
    expect(evaluateFunctional(functionals.eveMatchA, honestStrategy(0))).toBeCloseTo(0.5, 10);
    expect(evaluateFunctional(functionals.eveMatchB, honestStrategy(0))).toBeCloseTo(0.5, 10);
  });

  it("normalizes the joint distribution", () => {
    for (const eta of [0, 0.3, 1]) {
      expect(
        evaluateFunctional(functionals.normalization, honestStrategy(eta))
      ).toBeCloseTo(1, 10);
    }
  });

  it("fully depolarized relay halves the compliance", () => {
    expect(evaluateFunctional(functionals.abMatch, honestStrategy(1))).toBeCloseTo(0.5, 10);
  });

  it("produces pointwise-valid probabilities", () => {
    const strategy = honestStrategy(0.2);
    for (let a = 0; a < 2; a++)
      for (let b = 0; b < 2; b++)
        for (let bp = 0; bp < 2; bp++) {
          let total = 0;
          for (let x = 0; x < 2; x++)
            for (let y = 0; y < 2; y++)
              for (let e = 0; e < 2; e++) {
                const p = jointProbability(data, strategy, a, b, bp, x, y, e);
                expect(p).toBeGreaterThan(-1e-12);
                total += p;
              }
          expect(total).toBeCloseTo(1, 10);
        }
  });
});

describe("intercept-resend strategy", () => {
  const strategy = interceptResendStrategy();

  it("matches the dilated-isometry oracle on the 32-dimensional joint space", () => {
    // wire -> relay (x) ancilla copying in the computational basis; Bob consumes
    // the relay, the outcome-e projector acts on the ancilla
    const oracle = (a: number, b: number, bp: number, x: number, y: number, e: number) => {
      const bob = data.bob[b][bp][y];
      const m = zeros(8, 8); // (wire, B_O, ancilla)
      for (let w = 0; w < 2; w++)
        for (let o = 0; o < 2; o++)
          for (let wp = 0; wp < 2; wp++)
            for (let op = 0; op < 2; op++) {
              // ancilla indices are copies of the wire, projected on |e>
              if (w !== e || wp !== e) continue;
              m[(w * 2 + o) * 2 + w][(wp * 2 + op) * 2 + wp] =
                bob[w * 2 + o][wp * 2 + op];
            }
      const eye2 = [
        [1, 0],
        [0, 1],
      ];
      const joint = kron(data.process, eye2); // (A_I, A_O, wire, B_O) (x) anc
      // reorder instrument to match: A on (A_I, A_O), m on (wire, B_O, anc)
      const instrument = kron(data.alice[a][x], m);
      return traceProduct(joint, instrument);
    };
    for (let a = 0; a < 2; a++)
      for (let b = 0; b < 2; b++)
        for (let bp = 0; bp < 2; bp++)
          for (let x = 0; x < 2; x++)
            for (let y = 0; y < 2; y++)
              for (let e = 0; e < 2; e++) {
                const direct = jointProbability(data, strategy, a, b, bp, x, y, e);
                expect(direct).toBeCloseTo(oracle(a, b, bp, x, y, e), 10);
              }
  });

  it("drops the parties' compliance to the halfway mix", () => {
    const value = evaluateFunctional(functionals.abMatch, strategy);
    expect(value).toBeCloseTo((OPTIMUM + 0.5) / 2, 10);
  });

  it("correlates with the receiver-side key at 3/4", () => {
    expect(evaluateFunctional(functionals.eveMatchB, strategy)).toBeCloseTo(0.75, 10);
  });
});
