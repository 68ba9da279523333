/** Minimal canvas plotting: step curves per bucket, markers, reference lines. */

export interface Frame {
    width: number;
    height: number;
    xMin: number;
    xMax: number;
    yMin: number;
    yMax: number;
}

const PAD = 28;

export function frameFor(
    width: number,
    height: number,
    xs: number[],
    ys: number[]
): Frame {
    const finiteYs = ys.filter(Number.isFinite);
    const yMin = Math.min(...finiteYs);
    const yMax = Math.max(...finiteYs);
    const spread = yMax - yMin || 1;
    return {
        width,
        height,
        xMin: Math.min(...xs),
        xMax: Math.max(...xs),
        yMin: yMin - 0.08 * spread,
        yMax: yMax + 0.08 * spread,
    };
}

export function toPixelX(frame: Frame, x: number): number {
    return PAD + ((x - frame.xMin) / (frame.xMax - frame.xMin)) * (frame.width - 2 * PAD);
}

export function toPixelY(frame: Frame, y: number): number {
    return (
        frame.height -
        PAD -
        ((y - frame.yMin) / (frame.yMax - frame.yMin)) * (frame.height - 2 * PAD)
    );
}

export function clear(ctx: CanvasRenderingContext2D, frame: Frame): void {
    ctx.fillStyle = "#ffffff";
    ctx.fillRect(0, 0, frame.width, frame.height);
    ctx.strokeStyle = "#cccccc";
    ctx.strokeRect(PAD, PAD, frame.width - 2 * PAD, frame.height - 2 * PAD);
}

/** Piecewise-constant bucket curve. */
export function drawStepCurve(
    ctx: CanvasRenderingContext2D,
    frame: Frame,
    meshEdges: number[],
    values: number[],
    color: string,
    lineWidth = 2
): void {
    ctx.strokeStyle = color;
    ctx.lineWidth = lineWidth;
    ctx.beginPath();
    for (let k = 0; k < values.length; k++) {
        const y = toPixelY(frame, values[k]);
        const x0 = toPixelX(frame, meshEdges[k]);
        const x1 = toPixelX(frame, meshEdges[k + 1]);
        if (k === 0) {
            ctx.moveTo(x0, y);
        } else {
            ctx.lineTo(x0, y);
        }
        ctx.lineTo(x1, y);
    }
    ctx.stroke();
}

export function drawHorizontalReference(
    ctx: CanvasRenderingContext2D,
    frame: Frame,
    level: number,
    color = "#888888"
): void {
    ctx.strokeStyle = color;
    ctx.lineWidth = 1;
    ctx.setLineDash([5, 4]);
    ctx.beginPath();
    ctx.moveTo(toPixelX(frame, frame.xMin), toPixelY(frame, level));
    ctx.lineTo(toPixelX(frame, frame.xMax), toPixelY(frame, level));
    ctx.stroke();
    ctx.setLineDash([]);
}

export function drawMarkers(
    ctx: CanvasRenderingContext2D,
    frame: Frame,
    points: Array<[number, number]>,
    color: string,
    radius = 4
): void {
    ctx.fillStyle = color;
    for (const [x, y] of points) {
        ctx.beginPath();
        ctx.arc(toPixelX(frame, x), toPixelY(frame, y), radius, 0, 2 * Math.PI);
        ctx.fill();
    }
}

export function drawScatter(
    ctx: CanvasRenderingContext2D,
    frame: Frame,
    points: Array<[number, number]>,
    color: string
): void {
    drawMarkers(ctx, frame, points, color, 2.5);
}
