import assert from "node:assert/strict";
import { test } from "node:test";

import { ServiceError, SolveRequestBody, WorkbenchApi } from "../src/api.js";
import { Session } from "../src/session.js";
import { ImpliedSeries, ProductState, SolveResponse, ValidationDoc } from "../src/types.js";

const PRODUCT: ProductState = {
    meshEdges: [0, 1, 2],
    market: [0.25, 0.75],
    belief: [0.5, 0.5],
};

const VALIDATION: ValidationDoc = {
    classification: "consistent-risk-averse",
    rational: true,
    checks: [],
    notes: [],
};

function response(tag: number): SolveResponse {
    return {
        growth_optimal: [2, 2 / 3],
        payoff: [tag, tag],
        implied_r: { x: [1], values: [1], markers: {} },
        cost_residual: 0,
        manifest: {},
        validation: VALIDATION,
    };
}

const IMPLIED: ImpliedSeries = { x: [1], values: [1], markers: {} };

interface PendingSolve {
    body: SolveRequestBody;
    resolve: (r: SolveResponse) => void;
    reject: (e: Error) => void;
    aborted: boolean;
}

class FakeApi implements WorkbenchApi {
    solves: PendingSolve[] = [];
    honorAbort = true;

    solve(body: SolveRequestBody, signal?: AbortSignal): Promise<SolveResponse> {
        return new Promise((resolve, reject) => {
            const pending: PendingSolve = { body, resolve, reject, aborted: false };
            this.solves.push(pending);
            signal?.addEventListener("abort", () => {
                pending.aborted = true;
                if (this.honorAbort) {
                    const err = new Error("aborted");
                    err.name = "AbortError";
                    reject(err);
                }
            });
        });
    }

    implyRiskAversion(): Promise<ImpliedSeries> {
        return Promise.resolve(IMPLIED);
    }

    validate(): Promise<ValidationDoc> {
        return Promise.resolve(VALIDATION);
    }
}

test("successful commit applies the response and clears dirt", async () => {
    const api = new FakeApi();
    const session = new Session(api, PRODUCT, { kind: "family", family: "log" }, 0);
    const done = session.commit();
    api.solves[0].resolve(response(1));
    await done;
    const snap = session.snapshot();
    assert.equal(snap.lastResponse?.payoff[0], 1);
    assert.equal(snap.errorBanner, null);
    assert.deepEqual(snap.dirty, { belief: false, risk: false });
});

test("newer commit aborts and supersedes the older one", async () => {
    const api = new FakeApi();
    const session = new Session(api, PRODUCT, { kind: "family", family: "log" }, 0);
    const first = session.commit();
    const second = session.commit();
    assert.equal(api.solves[0].aborted, true);
    api.solves[1].resolve(response(2));
    await Promise.all([first, second]);
    assert.equal(session.snapshot().lastResponse?.payoff[0], 2);
});

test("stale response is dropped even without abort plumbing", async () => {
    const api = new FakeApi();
    api.honorAbort = false;
    const session = new Session(api, PRODUCT, { kind: "family", family: "log" }, 0);
    const first = session.commit();
    const second = session.commit();
    api.solves[1].resolve(response(2));
    await second;
    api.solves[0].resolve(response(1)); // late arrival from the superseded request
    await first;
    assert.equal(session.snapshot().lastResponse?.payoff[0], 2);
});

test("failed solve raises the banner and preserves state", async () => {
    const api = new FakeApi();
    const session = new Session(api, PRODUCT, { kind: "family", family: "log" }, 0);
    const ok = session.commit();
    api.solves[0].resolve(response(7));
    await ok;

    session.setBelief([0.4, 0.6]);
    const failing = session.commit();
    api.solves[api.solves.length - 1].reject(new ServiceError(0, "service unreachable"));
    await failing;

    const snap = session.snapshot();
    assert.match(snap.errorBanner ?? "", /unreachable/);
    assert.equal(snap.lastResponse?.payoff[0], 7); // charts keep the last success
    assert.deepEqual(snap.product.belief, [0.4, 0.6]); // inputs preserved
    assert.equal(snap.dirty.belief, true);
});

test("next successful solve clears the banner", async () => {
    const api = new FakeApi();
    const session = new Session(api, PRODUCT, { kind: "family", family: "log" }, 0);
    const failing = session.commit();
    api.solves[0].reject(new ServiceError(422, "risk-loving input"));
    await failing;
    assert.match(session.snapshot().errorBanner ?? "", /risk-loving/);

    const ok = session.commit();
    api.solves[1].resolve(response(3));
    await ok;
    assert.equal(session.snapshot().errorBanner, null);
});

test("belief edits below the floor are rejected without a commit", () => {
    const api = new FakeApi();
    const session = new Session(api, PRODUCT, { kind: "family", family: "log" }, 0);
    const message = session.editBeliefValue(0, 0);
    assert.match(message ?? "", /floor/);
    assert.equal(api.solves.length, 0);
    assert.deepEqual(session.snapshot().product.belief, [0.5, 0.5]);
});

test("belief edits send the solve for the edited weights", async () => {
    const api = new FakeApi();
    const session = new Session(api, PRODUCT, { kind: "family", family: "log" }, 0);
    const message = session.editBeliefValue(0, 1.0);
    assert.equal(message, null);
    assert.ok(api.solves.length >= 1);
    const body = api.solves[api.solves.length - 1].body;
    assert.ok(Math.abs(body.belief.reduce((a, b) => a + b, 0) - 1) < 1e-15);
    assert.ok(body.belief[0] > 0.6); // the edited bucket gained mass
});
