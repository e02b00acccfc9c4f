// Debounced CSV editor synchronization: every keystroke schedules a
// replace_csv op; identical text never emits.

import { EditOp } from "./types.js";

export type CsvTable = "streams" | "links" | "labels";

export interface CsvSync {
    edited(text: string): void;
    /** Server-confirmed text (after a push); suppresses the echo. */
    confirm(text: string): void;
    flush(): void;
}

export function createCsvSync(
    table: CsvTable,
    send: (op: EditOp) => void,
    debounceMs = 250,
    timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
        set: setTimeout,
        clear: clearTimeout,
    },
): CsvSync {
    let lastSynced: string | null = null;
    let pending: string | null = null;
    let handle: ReturnType<typeof setTimeout> | null = null;

    const fire = () => {
        handle = null;
        if (pending === null || pending === lastSynced) {
            pending = null;
            return;
        }
        const text = pending;
        pending = null;
        lastSynced = text;
        send({ op: "replace_csv", table, text });
    };

    return {
        edited(text: string) {
            if (text === lastSynced && handle === null) {
                return; // no change: no op
            }
            pending = text;
            if (handle !== null) {
                timers.clear(handle);
            }
            handle = timers.set(fire, debounceMs);
        },
        confirm(text: string) {
            lastSynced = text;
        },
        flush() {
            if (handle !== null) {
                timers.clear(handle);
                fire();
            }
        },
    };
}
