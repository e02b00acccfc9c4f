// Hit regions derived from /api/layout node positions. Streams are bands
// around their per-timepoint nodes; everything else is background.

import { LayoutNode } from "./types.js";

export interface StreamHit {
    kind: "stream";
    id: string;
    node: LayoutNode;
}

export type Hit = StreamHit | null;

const HIT_SLACK_PX = 5;

export function streamIdOf(node: LayoutNode): string {
    return node.owner.replace(/^stream:/, "");
}

/** Nearest stream node covering (x, y), or null for empty canvas. */
export function hitTest(nodes: LayoutNode[], x: number, y: number, pxPerStep: number): Hit {
    let best: LayoutNode | null = null;
    let bestDist = Infinity;
    const halfStep = Math.max(pxPerStep / 2, HIT_SLACK_PX);
    for (const node of nodes) {
        if (node.kind !== "stream") continue;
        if (Math.abs(node.x - x) > halfStep) continue;
        const dy = Math.abs(node.y - y);
        if (dy > node.size / 2 + HIT_SLACK_PX) continue;
        const d = Math.abs(node.x - x) + dy;
        if (d < bestDist) {
            bestDist = d;
            best = node;
        }
    }
    return best ? { kind: "stream", id: streamIdOf(best), node: best } : null;
}

/** The stream's node nearest in time to t (resize handles snap to nodes). */
export function nearestStreamNode(
    nodes: LayoutNode[],
    streamId: string,
    t: number,
): LayoutNode | null {
    let best: LayoutNode | null = null;
    let bestDist = Infinity;
    for (const node of nodes) {
        if (node.kind !== "stream" || streamIdOf(node) !== streamId) continue;
        const d = Math.abs(node.t - t);
        if (d < bestDist) {
            bestDist = d;
            best = node;
        }
    }
    return best;
}
