// Label entry popup: text, type (in/out/on), size in em. Confirm stays
// disabled while the text is empty; cancel resolves null.

import { LabelDialogResult } from "./gestures.js";

export function labelDialog(): Promise<LabelDialogResult | null> {
    return new Promise((resolve) => {
        const backdrop = document.createElement("div");
        backdrop.className = "dialog-backdrop";
        backdrop.innerHTML = `
          <div class="dialog">
            <h3>Add label</h3>
            <label>Text <input type="text" name="text" autofocus></label>
            <label>Type
              <select name="type">
                <option value="in" selected>in</option>
                <option value="out">out</option>
                <option value="on">on</option>
              </select>
            </label>
            <label>Size (em) <input type="number" name="size" value="1" min="0.25" step="0.25"></label>
            <div class="dialog-buttons">
              <button name="cancel" type="button">Cancel</button>
              <button name="confirm" type="button" disabled>Add</button>
            </div>
          </div>`;
        document.body.appendChild(backdrop);

        const text = backdrop.querySelector<HTMLInputElement>('input[name="text"]')!;
        const type = backdrop.querySelector<HTMLSelectElement>('select[name="type"]')!;
        const size = backdrop.querySelector<HTMLInputElement>('input[name="size"]')!;
        const confirm = backdrop.querySelector<HTMLButtonElement>('button[name="confirm"]')!;
        const cancel = backdrop.querySelector<HTMLButtonElement>('button[name="cancel"]')!;

        const close = (result: LabelDialogResult | null) => {
            backdrop.remove();
            resolve(result);
        };
        text.addEventListener("input", () => {
            confirm.disabled = text.value.length === 0;
        });
        confirm.addEventListener("click", () =>
            close({
                text: text.value,
                type: type.value as LabelDialogResult["type"],
                size: Number(size.value) || 1,
            }),
        );
        cancel.addEventListener("click", () => close(null));
        backdrop.addEventListener("keydown", (ev) => {
            if (ev.key === "Escape") close(null);
            if (ev.key === "Enter" && !confirm.disabled) confirm.click();
        });
        text.focus();
    });
}
