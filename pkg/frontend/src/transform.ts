// Time <-> pixel transform, mirroring the server's x mapping so overlay
// coordinates line up with the rendered SVG.

import { ChartJson, ConfigJson } from "./types.js";

export interface Transform {
    timeToPx(t: number): number;
    pxToTime(x: number): number;
    pxPerStep: number;
    step: number;
    tMin: number;
    tMax: number;
}

export function chartTransform(config: ConfigJson, chart: ChartJson): Transform {
    const { width, margin } = config.canvas;
    let tMin = 0;
    let tMax = 1;
    if (chart.streams.length > 0) {
        tMin = Math.min(...chart.streams.map((s) => s.t0));
        tMax = Math.max(...chart.streams.map((s) => s.t1));
    }
    const span = tMax - tMin;
    const pxPerUnit = span > 0 ? (width - 2 * margin) / span : 0;
    return {
        timeToPx: (t) => (span > 0 ? margin + (t - tMin) * pxPerUnit : width / 2),
        pxToTime: (x) => (pxPerUnit > 0 ? tMin + (x - margin) / pxPerUnit : tMin),
        pxPerStep: config.step * pxPerUnit,
        step: config.step,
        tMin,
        tMax,
    };
}
