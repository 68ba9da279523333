/** DOM wiring for the workbench page. All numbers on screen come from the
 * service; this file only routes events and repaints canvases. */

import { HttpApi } from "./api.js";
import { halveSkewPreset, setToMarket } from "./beliefs.js";
import {
    clear,
    drawHorizontalReference,
    drawMarkers,
    drawScatter,
    drawStepCurve,
    frameFor,
    Frame,
    toPixelX,
} from "./charts.js";
import { renderCurveCsv } from "./csv.js";
import { badges, frozenEdges, negativeEdges, payoffVersusReference } from "./diagnostics.js";
import { exportProduct, parseProduct } from "./product.js";
import { dialSpec, familySpec, flatProfile, withFrozenWings } from "./riskprofile.js";
import { Session } from "./session.js";
import { ProductState, RiskSpec } from "./types.js";

const SERVICE_URL =
    new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8080";

const DEMO_PRODUCT: ProductState = (() => {
    const n = 21;
    const meshEdges: number[] = [];
    for (let i = 0; i <= n; i++) {
        meshEdges.push(Math.exp(Math.log(0.5) + (i / n) * Math.log(4)));
    }
    const mids = meshEdges.slice(0, -1).map((e, k) => 0.5 * (e + meshEdges[k + 1]));
    const raw = mids.map((x) => Math.exp(-0.5 * ((Math.log(x) - 0.05) / 0.3) ** 2));
    const total = raw.reduce((a, b) => a + b, 0);
    const market = raw.map((w) => w / total);
    return { meshEdges, market, belief: market.slice(), name: "demo session" };
})();

const api = new HttpApi(SERVICE_URL);
const session = new Session(api, DEMO_PRODUCT, { kind: "family", family: "log" });

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
}

function canvasCtx(id: string): CanvasRenderingContext2D {
    const canvas = el<HTMLCanvasElement>(id);
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    return ctx;
}

let dragIndex: number | null = null;

function beliefFromPointer(event: PointerEvent): void {
    const canvas = el<HTMLCanvasElement>("beliefs-chart");
    const rect = canvas.getBoundingClientRect();
    const { product } = session.snapshot();
    const frame = beliefFrame(product);
    const px = ((event.clientX - rect.left) / rect.width) * canvas.width;
    const py = ((event.clientY - rect.top) / rect.height) * canvas.height;
    if (dragIndex === null) {
        let best = 0;
        let bestGap = Infinity;
        product.belief.forEach((_, k) => {
            const mid = 0.5 * (product.meshEdges[k] + product.meshEdges[k + 1]);
            const gap = Math.abs(toPixelX(frame, mid) - px);
            if (gap < bestGap) {
                bestGap = gap;
                best = k;
            }
        });
        dragIndex = best;
    }
    const value = frame.yMin + (1 - (py - 28) / (canvas.height - 56)) * (frame.yMax - frame.yMin);
    const message = session.editBeliefValue(dragIndex, Math.max(value, 1e-9));
    showEditMessage(message);
}

function beliefFrame(product: ProductState): Frame {
    const canvas = el<HTMLCanvasElement>("beliefs-chart");
    return frameFor(
        canvas.width,
        canvas.height,
        product.meshEdges,
        product.market.concat(product.belief, [0])
    );
}

function showEditMessage(message: string | null): void {
    el("edit-message").textContent = message ?? "";
}

function repaint(): void {
    const snap = session.snapshot();
    el("error-banner").textContent = snap.errorBanner ?? "";
    el("error-banner").style.display = snap.errorBanner ? "block" : "none";

    // beliefs over market
    const bctx = canvasCtx("beliefs-chart");
    const bframe = beliefFrame(snap.product);
    clear(bctx, bframe);
    drawStepCurve(bctx, bframe, snap.product.meshEdges, snap.product.market, "#999999", 1.5);
    drawStepCurve(bctx, bframe, snap.product.meshEdges, snap.product.belief, "#2266cc");
    drawMarkers(
        bctx,
        bframe,
        snap.product.belief.map((w, k) => [
            0.5 * (snap.product.meshEdges[k] + snap.product.meshEdges[k + 1]),
            w,
        ]),
        "#2266cc"
    );

    if (snap.lastResponse) {
        const response = snap.lastResponse;
        const pctx = canvasCtx("payoff-chart");
        const pframe = frameFor(
            pctx.canvas.width,
            pctx.canvas.height,
            snap.product.meshEdges,
            response.payoff.concat(response.growth_optimal, [1])
        );
        clear(pctx, pframe);
        drawHorizontalReference(pctx, pframe, 1.0);
        drawStepCurve(pctx, pframe, snap.product.meshEdges, response.growth_optimal, "#bb7722", 1.5);
        drawStepCurve(pctx, pframe, snap.product.meshEdges, response.payoff, "#117733");

        const sctx = canvasCtx("scatter-chart");
        const pairs = payoffVersusReference(response);
        const sframe = frameFor(
            sctx.canvas.width,
            sctx.canvas.height,
            pairs.map((p) => p[0]),
            pairs.map((p) => p[1])
        );
        clear(sctx, sframe);
        drawScatter(sctx, sframe, pairs, "#117733");

        const badgeList = el("badges");
        badgeList.innerHTML = "";
        badges(response.validation).forEach((badge) => {
            const item = document.createElement("li");
            item.textContent = `${badge.name}: ${badge.status}${badge.message ? " — " + badge.message : ""}`;
            item.className = `badge badge-${badge.status}`;
            badgeList.appendChild(item);
        });
    }

    if (snap.lastImplied) {
        const implied = snap.lastImplied;
        const ictx = canvasCtx("implied-chart");
        const finite = implied.values.filter((_, i) => implied.markers[String(i)] === undefined);
        const iframe = frameFor(
            ictx.canvas.width,
            ictx.canvas.height,
            implied.x,
            finite.concat([0, 1])
        );
        clear(ictx, iframe);
        drawHorizontalReference(ictx, iframe, 1.0, "#555555");
        drawHorizontalReference(ictx, iframe, 0.0, "#bbbbbb");
        const points = implied.x
            .map((x, i) => [x, implied.values[i], i] as [number, number, number])
            .filter(([, , i]) => implied.markers[String(i)] === undefined)
            .map(([x, y]) => [x, y] as [number, number]);
        drawMarkers(ictx, iframe, points, "#2266cc", 3);
        const negatives = new Set(negativeEdges(implied));
        drawMarkers(
            ictx,
            iframe,
            points.filter((_, idx) => negatives.has(idx)),
            "#cc2222",
            5
        );
        el("frozen-note").textContent = frozenEdges(implied).length
            ? `${frozenEdges(implied).length} edge(s) frozen by caps/floors`
            : "";
    }
}

function currentRisk(): RiskSpec {
    const family = el<HTMLSelectElement>("family-select").value;
    const param = Number(el<HTMLInputElement>("family-param").value);
    const { product } = session.snapshot();
    switch (family) {
        case "log":
            return familySpec("log");
        case "constant_relative":
            return familySpec("constant_relative", param);
        case "constant_absolute_over_f":
            return familySpec("constant_absolute_over_f", param);
        case "dial":
            return dialSpec(param);
        case "profile-wings": {
            const edges = product.meshEdges.length - 2;
            return { kind: "profile", values: withFrozenWings(flatProfile(edges, 1.0), 3) };
        }
        default:
            return familySpec("log");
    }
}

function wire(): void {
    const beliefCanvas = el<HTMLCanvasElement>("beliefs-chart");
    beliefCanvas.addEventListener("pointerdown", (event) => {
        dragIndex = null;
        beliefCanvas.setPointerCapture(event.pointerId);
        beliefFromPointer(event);
    });
    beliefCanvas.addEventListener("pointermove", (event) => {
        if (event.buttons & 1) beliefFromPointer(event);
    });
    beliefCanvas.addEventListener("pointerup", () => {
        dragIndex = null;
    });

    el("preset-market").addEventListener("click", () => {
        session.setBelief(setToMarket(session.snapshot().product.market));
    });
    el("preset-halve-skew").addEventListener("click", () => {
        const { product } = session.snapshot();
        session.setBelief(halveSkewPreset(product.meshEdges, product.market));
    });

    el("family-select").addEventListener("change", () => session.setRisk(currentRisk()));
    el("family-param").addEventListener("change", () => session.setRisk(currentRisk()));

    el("export-product").addEventListener("click", () => {
        const snap = session.snapshot();
        download("product.json", exportProduct(snap.product, snap.risk));
    });
    el("export-payoff").addEventListener("click", () => {
        const snap = session.snapshot();
        if (!snap.lastResponse) return;
        download(
            "payoff.csv",
            renderCurveCsv(snap.product.meshEdges, snap.lastResponse.payoff)
        );
    });
    el<HTMLInputElement>("import-product").addEventListener("change", async (event) => {
        const input = event.target as HTMLInputElement;
        const file = input.files?.[0];
        if (!file) return;
        try {
            session.loadProduct(parseProduct(await file.text()));
        } catch (err) {
            showEditMessage((err as Error).message);
        }
    });
}

function download(filename: string, text: string): void {
    const blob = new Blob([text], { type: "text/plain" });
    const anchor = document.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = filename;
    anchor.click();
    URL.revokeObjectURL(anchor.href);
}

session.onChange(repaint);
wire();
repaint();
void session.commit();
