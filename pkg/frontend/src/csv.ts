import { formatG17 } from "./format.js";

export const CURVE_HEADER = "x_left,x_right,value";
export const PROFILE_HEADER = "x_mid,R";

/** Render a bucket curve exactly as the backend writes it (byte parity). */
export function renderCurveCsv(meshEdges: number[], values: number[]): string {
    if (values.length !== meshEdges.length - 1) {
        throw new Error(`expected ${meshEdges.length - 1} values, got ${values.length}`);
    }
    const lines = [CURVE_HEADER];
    for (let k = 0; k < values.length; k++) {
        lines.push(
            `${formatG17(meshEdges[k])},${formatG17(meshEdges[k + 1])},${formatG17(values[k])}`
        );
    }
    return lines.join("\n") + "\n";
}

export interface ParsedCurve {
    meshEdges: number[];
    values: number[];
}

export function parseCurveCsv(text: string): ParsedCurve {
    const lines = text.split("\n").filter((line) => line.trim().length > 0);
    if (lines[0] !== CURVE_HEADER) {
        throw new Error(`expected header ${CURVE_HEADER}`);
    }
    const meshEdges: number[] = [];
    const values: number[] = [];
    lines.slice(1).forEach((line, index) => {
        const cells = line.split(",");
        if (cells.length !== 3) {
            throw new Error(`line ${index + 2}: expected 3 columns`);
        }
        const left = Number(cells[0]);
        const right = Number(cells[1]);
        const value = Number(cells[2]);
        if (!Number.isFinite(left) || !Number.isFinite(right) || !Number.isFinite(value)) {
            throw new Error(`line ${index + 2}: cannot parse numbers`);
        }
        if (meshEdges.length === 0) {
            meshEdges.push(left);
        } else if (meshEdges[meshEdges.length - 1] !== left) {
            throw new Error(`line ${index + 2}: buckets are not contiguous`);
        }
        meshEdges.push(right);
        values.push(value);
    });
    if (values.length < 2) {
        throw new Error("curve needs at least two buckets");
    }
    return { meshEdges, values };
}

/** Render an implied-aversion series with its marker literals. */
export function renderProfileCsv(
    positions: number[],
    values: number[],
    markers: Record<string, string>
): string {
    const lines = [PROFILE_HEADER];
    positions.forEach((x, i) => {
        const marker = markers[String(i)];
        const token = marker !== undefined ? marker : formatG17(values[i]);
        lines.push(`${formatG17(x)},${token}`);
    });
    return lines.join("\n") + "\n";
}
