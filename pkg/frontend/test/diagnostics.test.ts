import assert from "node:assert/strict";
import { test } from "node:test";

import {
    allGreen,
    badges,
    frozenEdges,
    negativeEdges,
    payoffVersusReference,
    scatterSpread,
} from "../src/diagnostics.js";
import { ImpliedSeries, SolveResponse, ValidationDoc } from "../src/types.js";

const SERIES: ImpliedSeries = {
    x: [1, 2, 3, 4],
    values: [1.2, -0.4, 0.0, 2.0],
    markers: { "2": "inf" },
};

test("negative edges skip marked entries", () => {
    assert.deepEqual(negativeEdges(SERIES), [1]);
});

test("frozen edges come from markers", () => {
    assert.deepEqual(frozenEdges(SERIES), [2]);
});

test("badges mirror the validation document", () => {
    const validation: ValidationDoc = {
        classification: "irrational-oscillation",
        rational: false,
        checks: [
            { name: "comonotonicity", status: "fail", indices: [3], message: "opposite moves" },
            { name: "budget", status: "pass", indices: [], message: "" },
        ],
        notes: [],
    };
    const list = badges(validation);
    assert.equal(list[0].name, "classification");
    assert.equal(list[0].status, "fail");
    assert.equal(list[0].message, "irrational-oscillation");
    assert.equal(allGreen(validation), false);
});

function responseWith(fs: number[], Fs: number[]): SolveResponse {
    return {
        growth_optimal: fs,
        payoff: Fs,
        implied_r: { x: [], values: [], markers: {} },
        cost_residual: 0,
        manifest: {},
        validation: { classification: "", rational: true, checks: [], notes: [] },
    };
}

test("payoff-versus-reference scatter sorts by reference", () => {
    const pairs = payoffVersusReference(responseWith([2.0, 0.5, 1.0], [1.4, 0.7, 1.0]));
    assert.deepEqual(pairs.map((p) => p[0]), [0.5, 1.0, 2.0]);
});

test("single-valued products have zero scatter spread", () => {
    const response = responseWith([0.5, 1.0, 0.5, 2.0], [0.7, 1.0, 0.7, 1.4]);
    assert.equal(scatterSpread(response), 0);
});

test("state-dependent products show a positive spread", () => {
    const response = responseWith([0.5, 1.0, 0.5, 2.0], [0.7, 1.0, 0.9, 1.4]);
    assert.ok(scatterSpread(response) > 0.19);
});
