// Thin typed client for the authoring-service HTTP API.

import { ChartJson, ConfigJson, EditOp, LayoutJson, LayoutNode, Violation } from "./types.js";

export interface OpAccepted {
    revision: number;
    created_id?: string;
}

export class OpRejected extends Error {
    constructor(public violations: Violation[]) {
        super(violations.map((v) => `${v.table}[${v.entity}]: ${v.message}`).join("; "));
    }
}

export class ApiClient {
    constructor(private base: string = "") {}

    private async getJson<T>(path: string): Promise<T> {
        const res = await fetch(this.base + path);
        if (!res.ok) throw new Error(`${path}: HTTP ${res.status}`);
        return (await res.json()) as T;
    }

    getChart(): Promise<ChartJson> {
        return this.getJson("/api/chart");
    }

    getLayout(): Promise<LayoutJson> {
        return this.getJson("/api/layout");
    }

    getConfig(): Promise<ConfigJson> {
        return this.getJson("/api/config");
    }

    async getSvg(): Promise<string> {
        const res = await fetch(this.base + "/api/svg");
        if (!res.ok) throw new Error(`/api/svg: HTTP ${res.status}`);
        return await res.text();
    }

    async postOp(op: EditOp): Promise<OpAccepted> {
        const res = await fetch(this.base + "/api/ops", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(op),
        });
        const body = await res.json();
        if (res.status === 422) {
            throw new OpRejected(body.violations as Violation[]);
        }
        if (!res.ok) throw new Error(`/api/ops: HTTP ${res.status}`);
        return body as OpAccepted;
    }

    save(): Promise<unknown> {
        return fetch(this.base + "/api/save", { method: "POST" }).then((r) => r.json());
    }

    /** Long-poll once; resolves with the new revision (or the same on timeout). */
    async pollUpdates(
        since: number,
        timeoutSec = 25,
    ): Promise<{ revision: number; layout: LayoutNode[]; changed: boolean }> {
        return this.getJson(`/api/updates?since=${since}&timeout=${timeoutSec}`);
    }
}
