// Client-side CSV rendering of the chart JSON, for the editor panes only.
// The server is the authority: edits flow back as replace_csv ops and the
// panes refresh from the pushed revision.

import { ChartJson } from "./types.js";

function cell(value: string): string {
    if (/[",\n]/.test(value)) {
        return `"${value.replace(/"/g, '""')}"`;
    }
    return value;
}

function num(v: number): string {
    return Number.isInteger(v) ? String(v) : String(v);
}

export function streamsCsv(chart: ChartJson): string {
    const rows = chart.streams.map((s) =>
        [
            cell(s.id),
            num(s.t0),
            num(s.t1),
            cell(s.color),
            s.sizes.map(([t, v]) => `${num(t)}/${num(v)}`).join(";"),
            s.parent ? cell(s.parent) : "",
        ].join(","),
    );
    return ["id,t0,t1,color,size,parent", ...rows].join("\n") + "\n";
}

export function linksCsv(chart: ChartJson): string {
    const rows = chart.links.map((l) =>
        [cell(l.from), num(l.t0), cell(l.to), l.t1 === null ? "" : num(l.t1),
         l.merge ? "true" : ""].join(","),
    );
    return ["from,t0,to,t1,merge", ...rows].join("\n") + "\n";
}

export function labelsCsv(chart: ChartJson): string {
    const rows = chart.labels.map((l) =>
        [cell(l.stream), num(l.t), cell(l.text), l.type, num(l.size)].join(","),
    );
    return ["stream,t,text,type,size", ...rows].join("\n") + "\n";
}
