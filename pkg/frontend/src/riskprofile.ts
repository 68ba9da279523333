import { RiskSpec } from "./types.js";

/** Editable per-edge control points; "inf" freezes the payoff locally. */

export function setControlPoint(
    values: Array<number | "inf">,
    index: number,
    value: number | "inf"
): Array<number | "inf"> {
    if (value !== "inf" && !(value > 0)) {
        throw new Error("forward profiles need positive aversion (or an inf cap)");
    }
    const next = values.slice();
    next[index] = value;
    return next;
}

export function flatProfile(nEdges: number, value: number | "inf"): Array<number | "inf"> {
    return new Array<number | "inf">(nEdges).fill(value);
}

/** Raise the wings: freeze the outer `wingEdges` edges on each side. */
export function withFrozenWings(
    values: Array<number | "inf">,
    wingEdges: number
): Array<number | "inf"> {
    return values.map((v, i) =>
        i < wingEdges || i >= values.length - wingEdges ? "inf" : v
    );
}

export function familySpec(
    family: "log" | "constant_relative" | "constant_absolute_over_f",
    param?: number
): RiskSpec {
    if (family === "log") {
        return { kind: "family", family: "log" };
    }
    if (param === undefined || !(param > 0)) {
        throw new Error(`${family} needs a positive parameter`);
    }
    return { kind: "family", family, param };
}

export function dialSpec(strength: number): RiskSpec {
    if (!(strength > 0)) {
        throw new Error("the family dial must be positive");
    }
    return { kind: "dial", strength };
}
