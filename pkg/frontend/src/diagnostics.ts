import { CheckDoc, ImpliedSeries, SolveResponse, ValidationDoc } from "./types.js";

/** Edges where the implied aversion is strictly negative (sign violations). */
export function negativeEdges(series: ImpliedSeries): number[] {
    const out: number[] = [];
    series.values.forEach((value, i) => {
        if (series.markers[String(i)] === undefined && value < 0) {
            out.push(i);
        }
    });
    return out;
}

/** Edges frozen by caps or floors (marked infinite). */
export function frozenEdges(series: ImpliedSeries): number[] {
    return Object.entries(series.markers)
        .filter(([, marker]) => marker === "inf" || marker === "-inf")
        .map(([index]) => Number(index));
}

export interface Badge {
    name: string;
    status: "pass" | "fail" | "inconclusive";
    message: string;
}

export function badges(validation: ValidationDoc): Badge[] {
    const checkBadges = validation.checks.map((check: CheckDoc) => ({
        name: check.name,
        status: check.status,
        message: check.message,
    }));
    return [
        {
            name: "classification",
            status: validation.rational ? "pass" : "fail",
            message: validation.classification,
        } as Badge,
    ].concat(checkBadges);
}

export function allGreen(validation: ValidationDoc): boolean {
    return badges(validation).every((badge) => badge.status !== "fail");
}

/** Payoff against reference, sorted by reference: the state-agnostic scatter.
 * A state-agnostic product traces a single-valued curve here. */
export function payoffVersusReference(response: SolveResponse): Array<[number, number]> {
    const pairs = response.growth_optimal.map(
        (f, k) => [f, response.payoff[k]] as [number, number]
    );
    pairs.sort((a, b) => a[0] - b[0]);
    return pairs;
}

/** Largest payoff gap among near-equal reference values (0 for single-valued). */
export function scatterSpread(response: SolveResponse, tol = 1e-6): number {
    const pairs = payoffVersusReference(response);
    const fScale = Math.max(...pairs.map((p) => p[0]));
    let worst = 0;
    for (let i = 1; i < pairs.length; i++) {
        let j = i - 1;
        while (j >= 0 && pairs[i][0] - pairs[j][0] <= tol * fScale) {
            worst = Math.max(worst, Math.abs(pairs[i][1] - pairs[j][1]));
            j--;
        }
    }
    return worst;
}
