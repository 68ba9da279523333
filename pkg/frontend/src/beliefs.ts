/** Belief editing in log space: positivity holds by construction and every
 * committed edit is renormalized to unit mass. */

export const WEIGHT_FLOOR = 1e-12;

export interface EditResult {
    ok: boolean;
    weights: number[];
    message?: string;
}

export function renormalize(weights: number[]): number[] {
    const total = weights.reduce((acc, w) => acc + w, 0);
    return weights.map((w) => w / total);
}

/** Move one control point to a new log-space value, then renormalize. */
export function applyLogDrag(weights: number[], index: number, logValue: number): EditResult {
    const value = Math.exp(logValue);
    return applyValueEdit(weights, index, value);
}

export function applyValueEdit(weights: number[], index: number, value: number): EditResult {
    if (!(value > 0) || !Number.isFinite(value)) {
        return {
            ok: false,
            weights,
            message: `weights must stay above the ${WEIGHT_FLOOR} positivity floor`,
        };
    }
    const next = weights.slice();
    next[index] = value;
    const normalized = renormalize(next);
    if (normalized.some((w) => w < WEIGHT_FLOOR)) {
        return {
            ok: false,
            weights,
            message: `edit would push a bucket below the ${WEIGHT_FLOOR} positivity floor`,
        };
    }
    return { ok: true, weights: normalized };
}

/** Preset: drop the view entirely (payoff chart flattens onto the bond). */
export function setToMarket(market: number[]): number[] {
    return market.slice();
}

/**
 * Preset: halve-the-skew. A log-linear reweighting of the market that tilts
 * weight toward the upside, the workbench's stand-in for "I believe half of
 * the market's skew". Fixture-defined shape, not a market model.
 */
export function halveSkewPreset(meshEdges: number[], market: number[]): number[] {
    const mids = market.map((_, k) => 0.5 * (meshEdges[k] + meshEdges[k + 1]));
    const logMids = mids.map(Math.log);
    const mean = logMids.reduce((acc, v) => acc + v, 0) / logMids.length;
    const tilted = market.map((w, k) => w * Math.exp(0.5 * (logMids[k] - mean)));
    return renormalize(tilted);
}
