// Authoring UI: renders the service's SVG directly and overlays an
// interaction layer with hit regions from /api/layout. All edits flow
// through /api/ops; the view re-renders from pushed revisions (the client
// never mutates chart state locally).

import { ApiClient, OpRejected } from "./api.js";
import { labelsCsv, linksCsv, streamsCsv } from "./csv.js";
import { createCsvSync, CsvSync, CsvTable } from "./csvsync.js";
import { labelDialog } from "./dialog.js";
import { clickLabel, dragGesture, DragPoint, hoverResize } from "./gestures.js";
import { Hit, hitTest, nearestStreamNode } from "./hittest.js";
import { chartTransform, Transform } from "./transform.js";
import { ChartJson, ConfigJson, EditOp, LayoutNode } from "./types.js";

const DRAG_THRESHOLD_PX = 4;

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node as T;
}

class App {
    client = new ApiClient();
    chart!: ChartJson;
    layout: LayoutNode[] = [];
    config!: ConfigJson;
    transform!: Transform;

    svgHost = el<HTMLDivElement>("chart");
    overlay = el<HTMLDivElement>("overlay");
    ghost = el<HTMLDivElement>("ghost");
    handle = el<HTMLDivElement>("resize-handle");
    chip = el<HTMLButtonElement>("merge-chip");
    status = el<HTMLDivElement>("status");
    mergeToggle = el<HTMLInputElement>("merge-toggle");

    dragStart: { x: number; y: number } | null = null;
    dragging = false;
    resizing: { streamId: string; t: number; size: number; startY: number } | null = null;
    handleNode: LayoutNode | null = null;
    lastLinkMerge: boolean | null = null;

    syncs = new Map<CsvTable, CsvSync>();

    async init() {
        this.config = await this.client.getConfig();
        await this.refresh();
        this.bindPointer();
        this.bindEditors();
        el<HTMLButtonElement>("save").addEventListener("click", () => {
            void this.client.save().then(() => this.note("saved"));
        });
        void this.updateLoop();
    }

    // ------------------------------------------------------------------ view

    async refresh() {
        const [chart, layout, svg] = await Promise.all([
            this.client.getChart(),
            this.client.getLayout(),
            this.client.getSvg(),
        ]);
        this.chart = chart;
        this.layout = layout.nodes;
        this.transform = chartTransform(this.config, chart);
        this.svgHost.innerHTML = svg;
        const svgEl = this.svgHost.querySelector("svg");
        if (svgEl) {
            this.overlay.style.width = svgEl.getAttribute("width") + "px";
            this.overlay.style.height = svgEl.getAttribute("height") + "px";
        }
        el<HTMLSpanElement>("revision").textContent = String(chart.revision);
        this.fillEditor("streams", streamsCsv(chart));
        this.fillEditor("links", linksCsv(chart));
        this.fillEditor("labels", labelsCsv(chart));
    }

    fillEditor(table: CsvTable, text: string) {
        const area = el<HTMLTextAreaElement>(`csv-${table}`);
        this.syncs.get(table)?.confirm(text);
        if (document.activeElement !== area) {
            area.value = text;
            this.editorError(table, []);
        }
    }

    note(msg: string) {
        this.status.textContent = msg;
        this.status.classList.remove("error");
    }

    fail(msg: string) {
        this.status.textContent = msg;
        this.status.classList.add("error");
    }

    async updateLoop() {
        let since = this.chart.revision;
        for (;;) {
            try {
                const upd = await this.client.pollUpdates(since, 25);
                if (upd.changed) {
                    since = upd.revision;
                    await this.refresh();
                }
            } catch {
                await new Promise((r) => setTimeout(r, 1000));
            }
        }
    }

    async post(op: EditOp | null) {
        if (op === null) return;
        try {
            const result = await this.client.postOp(op);
            this.note(`revision ${result.revision}`);
            if (op.op === "add_link") {
                this.lastLinkMerge = op.merge;
                this.showChip();
            }
        } catch (err) {
            if (err instanceof OpRejected) {
                this.fail(err.message);
            } else {
                this.fail(String(err));
            }
        }
    }

    // --------------------------------------------------------------- gestures

    point(ev: PointerEvent): { x: number; y: number } {
        const rect = this.overlay.getBoundingClientRect();
        return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
    }

    dragPoint(p: { x: number; y: number }): DragPoint {
        const hit: Hit = hitTest(this.layout, p.x, p.y, this.transform.pxPerStep);
        return { t: this.transform.pxToTime(p.x), y: p.y, hit };
    }

    bindPointer() {
        this.overlay.addEventListener("pointerdown", (ev) => {
            this.overlay.setPointerCapture(ev.pointerId);
            this.dragStart = this.point(ev);
            this.dragging = false;
            this.hideChip();
        });

        this.overlay.addEventListener("pointermove", (ev) => {
            const p = this.point(ev);
            if (this.dragStart) {
                const dx = p.x - this.dragStart.x;
                const dy = p.y - this.dragStart.y;
                if (!this.dragging && Math.hypot(dx, dy) > DRAG_THRESHOLD_PX) {
                    this.dragging = true;
                }
                if (this.dragging) this.drawGhost(this.dragStart, p);
                return;
            }
            this.updateHover(p);
        });

        this.overlay.addEventListener("pointerup", (ev) => {
            const start = this.dragStart;
            this.dragStart = null;
            this.ghost.style.display = "none";
            if (!start) return;
            const p = this.point(ev);
            if (!this.dragging) {
                void this.clickAt(p);
                return;
            }
            this.dragging = false;
            const merge = this.mergeToggle.checked !== ev.altKey; // alt flips
            const op = dragGesture(this.dragPoint(start), this.dragPoint(p), {
                step: this.transform.step,
                merge,
            });
            void this.post(op);
        });

        this.overlay.addEventListener("pointerleave", () => {
            if (!this.resizing) this.handle.style.display = "none";
        });

        this.bindHandle();
    }

    async clickAt(p: { x: number; y: number }) {
        const hit = hitTest(this.layout, p.x, p.y, this.transform.pxPerStep);
        if (!hit) return;
        const t = hit.node.t;
        const result = await labelDialog();
        void this.post(clickLabel(hit.id, t, result));
    }

    drawGhost(a: { x: number; y: number }, b: { x: number; y: number }) {
        const g = this.ghost;
        g.style.display = "block";
        g.style.left = Math.min(a.x, b.x) + "px";
        g.style.top = Math.min(a.y, b.y) + "px";
        g.style.width = Math.abs(b.x - a.x) + "px";
        g.style.height = Math.max(Math.abs(b.y - a.y), 2) + "px";
    }

    updateHover(p: { x: number; y: number }) {
        const hit = hitTest(this.layout, p.x, p.y, this.transform.pxPerStep);
        if (!hit) {
            if (!this.resizing) this.handle.style.display = "none";
            this.handleNode = null;
            return;
        }
        const node = nearestStreamNode(this.layout, hit.id, this.transform.pxToTime(p.x));
        if (!node) return;
        this.handleNode = node;
        this.handle.style.display = "block";
        this.handle.style.left = node.x - 6 + "px";
        this.handle.style.top = node.y - node.size / 2 - 14 + "px";
    }

    bindHandle() {
        this.handle.addEventListener("pointerdown", (ev) => {
            ev.stopPropagation();
            if (!this.handleNode) return;
            this.handle.setPointerCapture(ev.pointerId);
            this.resizing = {
                streamId: this.handleNode.owner.replace(/^stream:/, ""),
                t: this.handleNode.t,
                size: this.handleNode.size,
                startY: ev.clientY,
            };
        });
        this.handle.addEventListener("pointermove", (ev) => {
            if (!this.resizing) return;
            const grow = this.resizing.startY - ev.clientY;
            this.handle.style.top =
                (this.handleNode ? this.handleNode.y - this.handleNode.size / 2 : 0) -
                14 - grow + "px";
        });
        this.handle.addEventListener("pointerup", (ev) => {
            if (!this.resizing) return;
            const r = this.resizing;
            this.resizing = null;
            const deltaUnits = r.startY - ev.clientY; // px == thickness units
            void this.post(hoverResize(r.streamId, r.t, r.size, deltaUnits));
        });
    }

    showChip() {
        this.chip.style.display = "inline-block";
        this.chip.textContent = this.lastLinkMerge ? "merge ✓ (click: nested)" : "nested ✓ (click: merge)";
        window.setTimeout(() => this.hideChip(), 6000);
    }

    hideChip() {
        this.chip.style.display = "none";
    }

    async flipLastLink() {
        const idx = this.chart.links.length - 1;
        if (idx < 0) return;
        const link = this.chart.links[idx];
        await this.post({ op: "delete", kind: "link", id: String(idx) });
        await this.post({
            op: "add_link",
            from: link.from,
            t0: link.t0,
            to: link.to,
            t1: link.t1 ?? undefined,
            merge: !link.merge,
        });
        this.hideChip();
    }

    // ---------------------------------------------------------------- editors

    bindEditors() {
        for (const table of ["streams", "links", "labels"] as CsvTable[]) {
            const area = el<HTMLTextAreaElement>(`csv-${table}`);
            const sync = createCsvSync(table, (op) => {
                this.client
                    .postOp(op)
                    .then(() => this.editorError(table, []))
                    .catch((err) => {
                        if (err instanceof OpRejected) {
                            this.editorError(
                                table,
                                err.violations.map((v) => `${v.entity}: ${v.message}`),
                            );
                        } else {
                            this.editorError(table, [String(err)]);
                        }
                    });
            });
            this.syncs.set(table, sync);
            area.addEventListener("input", () => sync.edited(area.value));
            area.addEventListener("blur", () => sync.flush());
        }
        this.chip.addEventListener("click", () => void this.flipLastLink());
    }

    editorError(table: CsvTable, messages: string[]) {
        const box = el<HTMLDivElement>(`csv-${table}-errors`);
        box.textContent = messages.join("\n");
        box.style.display = messages.length ? "block" : "none";
    }
}

new App().init().catch((err) => {
    document.body.textContent = `failed to start: ${err}`;
});
