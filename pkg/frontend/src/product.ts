import { formatG17 } from "./format.js";
import { ProductState, RiskSpec } from "./types.js";

/**
 * Deterministic JSON, byte-compatible with the backend's writer: sorted
 * keys, two-space indent, 17-significant-digit numbers, trailing newline.
 */
export function dumpsDeterministic(doc: unknown): string {
    return render(doc, 0) + "\n";
}

function render(node: unknown, depth: number): string {
    const pad = "  ".repeat(depth + 1);
    const closing = "  ".repeat(depth);
    if (node === null) {
        return "null";
    }
    if (typeof node === "boolean") {
        return node ? "true" : "false";
    }
    if (typeof node === "number") {
        return formatG17(node);
    }
    if (typeof node === "string") {
        return JSON.stringify(node);
    }
    if (Array.isArray(node)) {
        if (node.length === 0) {
            return "[]";
        }
        const items = node.map((item) => `${pad}${render(item, depth + 1)}`);
        return "[\n" + items.join(",\n") + `\n${closing}]`;
    }
    if (typeof node === "object") {
        const record = node as Record<string, unknown>;
        const keys = Object.keys(record).sort();
        if (keys.length === 0) {
            return "{}";
        }
        const items = keys.map(
            (key) => `${pad}${JSON.stringify(key)}: ${render(record[key], depth + 1)}`
        );
        return "{\n" + items.join(",\n") + `\n${closing}}`;
    }
    throw new Error(`cannot serialize ${typeof node}`);
}

/** Product document in the exact shape the CLI accepts. */
export function productDoc(product: ProductState, risk?: RiskSpec): Record<string, unknown> {
    const doc: Record<string, unknown> = {
        mesh: product.meshEdges,
        market: product.market,
        belief: product.belief,
    };
    if (product.name || product.notes) {
        const metadata: Record<string, unknown> = {};
        if (product.name) metadata.name = product.name;
        if (product.notes) metadata.notes = product.notes;
        doc.metadata = metadata;
    }
    if (risk) {
        const inline = inlineRiskProfile(risk);
        if (inline) {
            doc.risk_profile = inline;
        }
    }
    return doc;
}

export function exportProduct(product: ProductState, risk?: RiskSpec): string {
    return dumpsDeterministic(productDoc(product, risk));
}

/** Inline risk_profile entry for product files; dial/max-loss stay CLI flags. */
export function inlineRiskProfile(risk: RiskSpec): Record<string, unknown> | null {
    switch (risk.kind) {
        case "family":
            if (risk.family === "log") {
                return { family: "log" };
            }
            if (risk.family === "constant_relative") {
                return { family: "constant_relative", R: risk.param };
            }
            return { family: "constant_absolute_over_f", a: risk.param };
        case "profile":
            return { values: risk.values };
        default:
            return null;
    }
}

/** Risk object for /v1/solve requests. */
export function requestRisk(risk: RiskSpec): Record<string, unknown> {
    switch (risk.kind) {
        case "family":
            return inlineRiskProfile(risk) as Record<string, unknown>;
        case "profile":
            return { profile: risk.values };
        case "dial":
            return { a: risk.strength };
        case "maxLoss":
            return { max_loss: risk.floor };
    }
}

export function parseProduct(text: string): ProductState {
    const doc = JSON.parse(text) as Record<string, unknown>;
    const meshEdges = asNumbers(doc.mesh, "mesh");
    const belief = asNumbers(doc.belief, "belief");
    let market: number[];
    if (doc.market !== undefined) {
        market = asNumbers(doc.market, "market");
    } else if (doc.prices !== undefined) {
        const prices = asNumbers(doc.prices, "prices");
        const total = prices.reduce((acc, p) => acc + p, 0);
        market = prices.map((p) => p / total);
    } else {
        throw new Error("product needs 'market' or 'prices'");
    }
    if (market.length !== meshEdges.length - 1 || belief.length !== market.length) {
        throw new Error("array lengths do not match the mesh");
    }
    const metadata = (doc.metadata ?? {}) as Record<string, unknown>;
    return {
        meshEdges,
        market,
        belief,
        name: typeof metadata.name === "string" ? metadata.name : undefined,
        notes: typeof metadata.notes === "string" ? metadata.notes : undefined,
    };
}

function asNumbers(node: unknown, what: string): number[] {
    if (!Array.isArray(node) || node.some((v) => typeof v !== "number")) {
        throw new Error(`'${what}' must be an array of numbers`);
    }
    return node as number[];
}
