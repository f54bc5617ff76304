import { describe, expect, it } from "vitest";

import {
  attackPoint,
  buildModel,
  findIntersection,
  sweep,
  toCsv,
} from "../src/attack.js";

const model = buildModel("fixtures/quantum_fixture.json");

describe("attack curve", () => {
  it("caps the eavesdropper at the protocol operating point", () => {
    const point = attackPoint(model, 0.8334);
    expect(point.status).toBe("optimal");
    expect(point.eveValue).toBeLessThanOrEqual(0.6664 + 5e-3);
    expect(point.eveValue).toBeGreaterThan(0.6664 - 5e-3); // solver actually converged
    expect(point.abValue).toBeGreaterThanOrEqual(0.8334 - 1e-6);
  });

  it("leaks more at looser acceptance levels", () => {
    const loose = attackPoint(model, 0.5);
    expect(loose.status).toBe("optimal");
    expect(loose.eveValue).toBeGreaterThan(0.6664);
  });

  it("is non-increasing across the grid with values in [0, 1]", () => {
    const points = sweep(model, [0.55, 0.65, 0.75, 0.8, 0.8334]);
    for (const p of points) {
      expect(p.status).toBe("optimal");
      expect(p.eveValue).toBeGreaterThanOrEqual(-1e-8);
      expect(p.eveValue).toBeLessThanOrEqual(1 + 1e-8);
      expect(p.abValue).toBeGreaterThanOrEqual(-1e-8);
      expect(p.abValue).toBeLessThanOrEqual(1 + 1e-8);
    }
    for (let i = 1; i < points.length; i++) {
      expect(points[i].eveValue).toBeLessThanOrEqual(points[i - 1].eveValue + 1e-6);
    }
  });

  it("stays essentially trivial near the undisturbed compliance", () => {
    const point = attackPoint(model, model.honestCompliance - 1e-4);
    expect(point.status).toBe("optimal");
    expect(point.eveValue).toBeLessThan(0.53);
  });

  it("reports infeasible beyond the reachable compliance", () => {
    expect(attackPoint(model, 0.86).status).toBe("infeasible");
  });

  it("finds the break-even acceptance level", () => {
    const qStar = findIntersection(model, 0.7, 0.82, 14);
    expect(qStar).not.toBeNull();
    expect(Math.abs(qStar! - 0.7887)).toBeLessThanOrEqual(0.005);
  });

  it("serializes to the CSV wire format", () => {
    const csv = toCsv(
      [
        { q: 0.8334, eveValue: 0.6664, abValue: 0.8334, status: "optimal" },
        { q: 0.86, eveValue: NaN, abValue: NaN, status: "infeasible" },
      ],
      ["note"]
    );
    const lines = csv.trim().split("\n");
    expect(lines[0]).toBe("# note");
    expect(lines[1]).toBe("Q,eve_value,ab_value,status");
    expect(lines[2]).toBe("0.833400,0.666400,0.833400,optimal");
    expect(lines[3]).toContain("infeasible");
  });
});
