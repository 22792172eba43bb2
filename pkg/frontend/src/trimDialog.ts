/**
 * Trim pop-up: the per-second frame strip with click-set start/end markers, a
 * free-form trimming command box, and the rationale panel. Frames outside the
 * current window render dimmed.
 */

import { ApiClient } from "./client";
import type { ClipState, TrimPayload } from "./types";

export class TrimDialog {
  private overlay: HTMLElement | null = null;
  private assetId = -1;
  private start = 0;
  private end = 0;
  private settingStart = true;

  constructor(
    private client: ApiClient,
    private sid: string,
    private onError: (message: string) => void,
  ) {}

  get isOpen(): boolean {
    return this.overlay !== null;
  }

  async open(clip: ClipState): Promise<void> {
    this.close();
    this.assetId = clip.asset_id;
    this.start = clip.start_s;
    this.end = clip.end_s;
    this.settingStart = true;

    const overlay = document.createElement("div");
    overlay.className = "trim-overlay";
    overlay.innerHTML = `
      <div class="trim-dialog" data-asset="${clip.asset_id}">
        <div class="trim-guide">Click a frame to set the start, click again to set the end.
        Or describe the segment to keep and the agent trims for you.</div>
        <div class="frame-strip"></div>
        <div class="trim-controls">
          <input class="trim-command" type="text" placeholder="e.g. Give me the last 5 seconds">
          <button class="trim-run">Trim</button>
          <button class="trim-close">Close</button>
        </div>
        <div class="trim-rationale"></div>
      </div>`;
    document.body.appendChild(overlay);
    this.overlay = overlay;

    overlay.querySelector(".trim-close")!.addEventListener("click", () => this.close());
    overlay.querySelector(".trim-run")!.addEventListener("click", () => {
      void this.runCommand();
    });
    const input = overlay.querySelector(".trim-command") as HTMLInputElement;
    input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") void this.runCommand();
    });

    try {
      const { frames } = await this.client.frames(this.sid, clip.asset_id);
      const strip = overlay.querySelector(".frame-strip") as HTMLElement;
      strip.replaceChildren(
        ...frames.map((src, second) => {
          const holder = document.createElement("div");
          holder.className = "frame-cell";
          holder.dataset.second = String(second);
          holder.innerHTML = `<img src="${src}" alt="second ${second}"><span>${second}s</span>`;
          holder.addEventListener("click", () => this.pickBoundary(second));
          return holder;
        }),
      );
      this.applyDimming();
    } catch (err) {
      this.onError(String(err));
    }
  }

  close(): void {
    this.overlay?.remove();
    this.overlay = null;
  }

  /** Reflect a trim_window event (agent or manual) while the dialog is open. */
  showResult(result: TrimPayload): void {
    if (!this.overlay || result.asset_id !== this.assetId) return;
    const panel = this.overlay.querySelector(".trim-rationale") as HTMLElement;
    if (result.matched) {
      this.start = result.start_s;
      this.end = result.end_s;
      panel.textContent = result.rationale ?? "";
      this.applyDimming();
    } else {
      panel.textContent = `No matching segment. ${result.rationale ?? ""}`.trim();
    }
  }

  private pickBoundary(second: number): void {
    if (this.settingStart) {
      this.start = second;
      if (this.end <= this.start) this.end = this.start + 1;
      this.settingStart = false;
      this.applyDimming();
      return;
    }
    this.end = second + 1;
    if (this.end <= this.start) {
      this.start = second;
      this.end = second + 1;
    }
    this.settingStart = true;
    this.applyDimming();
    void this.applyManual();
  }

  private async applyManual(): Promise<void> {
    try {
      await this.client.timelineOp(this.sid, "trim", {
        asset_id: this.assetId,
        start_s: this.start,
        end_s: this.end,
      });
    } catch (err) {
      this.onError(String(err));
    }
  }

  private async runCommand(): Promise<void> {
    if (!this.overlay) return;
    const input = this.overlay.querySelector(".trim-command") as HTMLInputElement;
    const command = input.value.trim();
    if (!command) return;
    try {
      const { result } = await this.client.trimCommand(this.sid, this.assetId, command);
      this.showResult({ ...result, asset_id: this.assetId });
    } catch (err) {
      this.onError(String(err));
    }
  }

  private applyDimming(): void {
    if (!this.overlay) return;
    for (const cell of this.overlay.querySelectorAll(".frame-cell")) {
      const second = Number((cell as HTMLElement).dataset.second);
      cell.classList.toggle("dimmed", second < this.start || second >= this.end);
    }
  }
}
