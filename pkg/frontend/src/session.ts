import { SolveRequestBody, WorkbenchApi } from "./api.js";
import { applyLogDrag, applyValueEdit } from "./beliefs.js";
import { debounced } from "./debounce.js";
import { productDoc, requestRisk } from "./product.js";
import { ImpliedSeries, ProductState, RiskSpec, SolveResponse } from "./types.js";

export const COMMIT_DEBOUNCE_MS = 150;

export interface SessionSnapshot {
    product: ProductState;
    risk: RiskSpec;
    lastResponse: SolveResponse | null;
    lastImplied: ImpliedSeries | null;
    errorBanner: string | null;
    dirty: { belief: boolean; risk: boolean };
    inFlight: boolean;
}

/**
 * Workbench state: one product, one risk specification, and the last
 * successful solve. Charts always render from the last successful response;
 * a failed solve raises a banner and leaves both the inputs and the previous
 * response in place. One solve is in flight at a time: newer commits abort
 * the older request, and a response is applied only when it belongs to the
 * newest request.
 */
export class Session {
    private product: ProductState;
    private risk: RiskSpec;
    private lastResponse: SolveResponse | null = null;
    private lastImplied: ImpliedSeries | null = null;
    private errorBanner: string | null = null;
    private dirty = { belief: false, risk: false };
    private requestCounter = 0;
    private appliedRequest = 0;
    private inFlightController: AbortController | null = null;
    private listeners: Array<() => void> = [];
    private scheduleCommit: () => void;

    constructor(
        private api: WorkbenchApi,
        product: ProductState,
        risk: RiskSpec,
        debounceMs: number = COMMIT_DEBOUNCE_MS
    ) {
        this.product = product;
        this.risk = risk;
        this.scheduleCommit =
            debounceMs > 0 ? debounced(() => void this.commit(), debounceMs) : () => void this.commit();
    }

    snapshot(): SessionSnapshot {
        return {
            product: this.product,
            risk: this.risk,
            lastResponse: this.lastResponse,
            lastImplied: this.lastImplied,
            errorBanner: this.errorBanner,
            dirty: { ...this.dirty },
            inFlight: this.inFlightController !== null,
        };
    }

    onChange(listener: () => void): void {
        this.listeners.push(listener);
    }

    private notify(): void {
        this.listeners.forEach((listener) => listener());
    }

    /** Drag a belief control point (log space); rejected edits report why. */
    dragBelief(index: number, logValue: number): string | null {
        const result = applyLogDrag(this.product.belief, index, logValue);
        return this.applyBeliefEdit(result.ok, result.weights, result.message);
    }

    editBeliefValue(index: number, value: number): string | null {
        const result = applyValueEdit(this.product.belief, index, value);
        return this.applyBeliefEdit(result.ok, result.weights, result.message);
    }

    setBelief(weights: number[]): void {
        this.product = { ...this.product, belief: weights };
        this.dirty.belief = true;
        this.notify();
        this.scheduleCommit();
    }

    private applyBeliefEdit(ok: boolean, weights: number[], message?: string): string | null {
        if (!ok) {
            return message ?? "edit rejected";
        }
        this.setBelief(weights);
        return null;
    }

    setRisk(risk: RiskSpec): void {
        this.risk = risk;
        this.dirty.risk = true;
        this.notify();
        this.scheduleCommit();
    }

    loadProduct(product: ProductState): void {
        this.product = product;
        this.dirty = { belief: true, risk: true };
        this.notify();
        this.scheduleCommit();
    }

    /** Issue the solve + imply round trip for the current inputs. */
    async commit(): Promise<void> {
        const requestId = ++this.requestCounter;
        if (this.inFlightController) {
            this.inFlightController.abort(); // supersede the older request
        }
        const controller = new AbortController();
        this.inFlightController = controller;
        const body: SolveRequestBody = {
            mesh: this.product.meshEdges,
            market: this.product.market,
            belief: this.product.belief,
            risk: requestRisk(this.risk),
        };
        try {
            const response = await this.api.solve(body, controller.signal);
            const implied = await this.api.implyRiskAversion(
                productDoc(this.product),
                response.payoff,
                controller.signal
            );
            if (requestId !== this.requestCounter) {
                return; // a newer commit superseded this response
            }
            this.appliedRequest = requestId;
            this.lastResponse = response;
            this.lastImplied = implied;
            this.errorBanner = null;
            this.dirty = { belief: false, risk: false };
        } catch (err) {
            if ((err as Error).name === "AbortError") {
                return;
            }
            if (requestId !== this.requestCounter) {
                return;
            }
            // inputs and the last successful response stay untouched
            this.errorBanner = (err as Error).message;
        } finally {
            if (this.inFlightController === controller) {
                this.inFlightController = null;
            }
            this.notify();
        }
    }
}
