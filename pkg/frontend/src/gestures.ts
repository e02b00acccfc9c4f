// Gesture -> EditOp mapping. Pure functions over (points, hit tests) so the
// whole table is unit-testable without a browser; the DOM layer only
// collects coordinates and forwards server responses.

import { Hit } from "./hittest.js";
import { EditOp } from "./types.js";

export type Mode = "idle" | "dragging-new-stream" | "dragging-link" | "resizing" | "labeling";

export interface GestureState {
    mode: Mode;
    anchor: { t: number; y: number } | null; // set iff mode != idle
    hovered: string | null;
}

export function idleState(): GestureState {
    return { mode: "idle", anchor: null, hovered: null };
}

export interface DragPoint {
    t: number;
    y: number;
    hit: Hit;
}

export interface DragOptions {
    step: number;
    merge: boolean; // modifier/toggle at drop time
    color?: string;
}

const NEW_STREAM_COLOR = "#8A8A8A";

/**
 * Map a completed drag to an op:
 *   empty -> empty   new stream over the dragged time range
 *   entity -> entity link between them (merge per modifier)
 *   empty <-> entity new stream plus a link connecting both, one atomic op
 * Drags narrower than one step map to nothing. Points are normalized so the
 * link always advances time regardless of drag direction.
 */
export function dragGesture(start: DragPoint, end: DragPoint, opts: DragOptions): EditOp | null {
    if (Math.abs(end.t - start.t) < opts.step) {
        return null;
    }
    let a = start;
    let b = end;
    if (b.t < a.t) {
        [a, b] = [b, a];
    }
    const lo = a.t;
    const hi = b.t;
    const color = opts.color ?? NEW_STREAM_COLOR;

    if (a.hit === null && b.hit === null) {
        return { op: "add_stream", t0: lo, t1: hi, color };
    }
    if (a.hit !== null && b.hit !== null) {
        if (a.hit.id === b.hit.id) {
            return null; // a link needs two distinct entities
        }
        return { op: "add_link", from: a.hit.id, t0: a.t, to: b.hit.id, t1: b.t, merge: opts.merge };
    }
    if (a.hit === null) {
        // drag began on empty canvas: new source stream, linked to the target
        return {
            op: "add_link",
            from: null,
            fromSpan: [lo, hi],
            t0: a.t,
            to: b.hit!.id,
            t1: b.t,
            merge: opts.merge,
            color,
        };
    }
    return {
        op: "add_link",
        from: a.hit.id,
        t0: a.t,
        to: null,
        toSpan: [lo, hi],
        t1: b.t,
        merge: opts.merge,
        color,
    };
}

/**
 * Vertical drag on the hover handle adjusts the stream size at that node's
 * time; deltaUnits is the upward drag distance in chart units, and the
 * result never goes below 1.
 */
export function hoverResize(
    streamId: string,
    t: number,
    currentSize: number,
    deltaUnits: number,
): EditOp {
    return { op: "set_size_at", stream: streamId, t, size: Math.max(1, currentSize + deltaUnits) };
}

export interface LabelDialogResult {
    text: string;
    type: "in" | "out" | "on";
    size: number;
}

/** Click on a stream + confirmed dialog -> AddLabel; cancel -> nothing. */
export function clickLabel(
    streamId: string,
    t: number,
    result: LabelDialogResult | null,
): EditOp | null {
    if (result === null || result.text.length === 0) {
        return null;
    }
    return {
        op: "add_label",
        stream: streamId,
        t,
        text: result.text,
        type: result.type,
        size: result.size,
    };
}
