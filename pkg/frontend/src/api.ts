import { ImpliedSeries, SolveResponse, ValidationDoc } from "./types.js";

export interface SolveRequestBody {
    mesh: number[];
    market: number[];
    belief: number[];
    risk: Record<string, unknown>;
    allow_gambling?: boolean;
}

export interface WorkbenchApi {
    solve(body: SolveRequestBody, signal?: AbortSignal): Promise<SolveResponse>;
    implyRiskAversion(
        product: Record<string, unknown>,
        payoff: number[],
        signal?: AbortSignal
    ): Promise<ImpliedSeries>;
    validate(
        product: Record<string, unknown>,
        payoff: number[],
        signal?: AbortSignal
    ): Promise<ValidationDoc>;
}

export class ServiceError extends Error {
    constructor(public status: number, message: string) {
        super(message);
    }
}

export class HttpApi implements WorkbenchApi {
    constructor(private baseUrl: string) {}

    private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
        let response: Response;
        try {
            response = await fetch(this.baseUrl + path, {
                method: "POST",
                headers: { "Content-Type": "application/json" },
                body: JSON.stringify(body),
                signal,
            });
        } catch (err) {
            if ((err as Error).name === "AbortError") {
                throw err;
            }
            throw new ServiceError(0, `service unreachable: ${(err as Error).message}`);
        }
        const text = await response.text();
        if (!response.ok) {
            let message = text;
            try {
                message = (JSON.parse(text) as { error?: string }).error ?? text;
            } catch {
                // keep the raw body
            }
            throw new ServiceError(response.status, message);
        }
        return JSON.parse(text) as T;
    }

    solve(body: SolveRequestBody, signal?: AbortSignal): Promise<SolveResponse> {
        return this.post("/v1/solve", body, signal);
    }

    async implyRiskAversion(
        product: Record<string, unknown>,
        payoff: number[],
        signal?: AbortSignal
    ): Promise<ImpliedSeries> {
        const doc = await this.post<{ implied_r: ImpliedSeries }>(
            "/v1/imply-risk-aversion",
            { product, payoff },
            signal
        );
        return doc.implied_r;
    }

    validate(
        product: Record<string, unknown>,
        payoff: number[],
        signal?: AbortSignal
    ): Promise<ValidationDoc> {
        return this.post("/v1/validate", { product, payoff }, signal);
    }
}
