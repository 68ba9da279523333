export interface ProductState {
    meshEdges: number[];
    market: number[];
    belief: number[];
    name?: string;
    notes?: string;
}

export type RiskSpec =
    | { kind: "family"; family: "log" }
    | { kind: "family"; family: "constant_relative"; param: number }
    | { kind: "family"; family: "constant_absolute_over_f"; param: number }
    | { kind: "profile"; values: Array<number | "inf"> }
    | { kind: "dial"; strength: number }
    | { kind: "maxLoss"; floor: number };

export interface ImpliedSeries {
    x: number[];
    values: number[];
    markers: Record<string, string>;
}

export interface CheckDoc {
    name: string;
    status: "pass" | "fail" | "inconclusive";
    indices: number[];
    message: string;
}

export interface ValidationDoc {
    classification: string;
    rational: boolean;
    checks: CheckDoc[];
    recovered_risk_scale?: number;
    notes: string[];
}

export interface SolveResponse {
    growth_optimal: number[];
    payoff: number[];
    implied_r: ImpliedSeries;
    cost_residual: number;
    manifest: Record<string, unknown>;
    validation: ValidationDoc;
}
