import assert from "node:assert/strict";
import { test } from "node:test";

import { parseCurveCsv, renderCurveCsv, renderProfileCsv } from "../src/csv.js";

test("curve render/parse round trip", () => {
    const meshEdges = [0.5, 0.75, 1.25, 2.0];
    const values = [1.017, 0.9, 2 / 3];
    const text = renderCurveCsv(meshEdges, values);
    const parsed = parseCurveCsv(text);
    assert.deepEqual(parsed.meshEdges, meshEdges);
    assert.deepEqual(parsed.values, values);
    assert.equal(renderCurveCsv(parsed.meshEdges, parsed.values), text);
});

test("curve uses bare newlines and a trailing newline", () => {
    const text = renderCurveCsv([0, 1, 2], [1, 2]);
    assert.ok(!text.includes("\r"));
    assert.ok(text.endsWith("\n"));
    assert.equal(text.split("\n")[0], "x_left,x_right,value");
});

test("non-contiguous buckets rejected", () => {
    assert.throws(
        () => parseCurveCsv("x_left,x_right,value\n0,1,1\n1.5,2,1\n"),
        /contiguous/
    );
});

test("profile render keeps marker literals", () => {
    const text = renderProfileCsv([1.0, 2.0], [2.5, 0.0], { "1": "inf" });
    const lines = text.split("\n");
    assert.equal(lines[0], "x_mid,R");
    assert.equal(lines[1], "1,2.5");
    assert.equal(lines[2], "2,inf");
});
