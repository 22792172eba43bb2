/**
 * Editing timeline: one box per clip showing start/mid/end thumbnails and the
 * trim badge. Drag and drop reorders (the drop emits the full permutation);
 * double-click opens the trim dialog; Delete / Clear All / Undo / Play wire to
 * the direct-edit endpoints.
 */

import { ApiClient } from "./client";
import type { UiState } from "./model";
import type { ClipState } from "./types";

export class TimelineView {
  private strip: HTMLElement;
  private clips: ClipState[] = [];
  private draggedId: number | null = null;
  private selectedIds = new Set<number>();

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
    private sid: string,
    private onOpenTrim: (assetId: number) => void,
    private onError: (message: string) => void,
  ) {
    this.root.innerHTML = `
      <div class="panel-header">
        <span>Editing Timeline</span>
        <span class="panel-actions">
          <button data-action="delete">Delete</button>
          <button data-action="clear">Clear All</button>
          <button data-action="undo">Undo</button>
          <button data-action="play">Play</button>
        </span>
      </div>
      <div class="timeline-strip"></div>
      <div class="preview-holder"></div>`;
    this.strip = this.root.querySelector(".timeline-strip") as HTMLElement;
    this.bindButtons();
  }

  render(state: UiState): void {
    this.clips = state.timeline;
    this.selectedIds = new Set(
      [...this.selectedIds].filter((id) => this.clips.some((c) => c.asset_id === id)),
    );
    this.strip.replaceChildren(...this.clips.map((clip) => this.renderClip(clip)));
  }

  private renderClip(clip: ClipState): HTMLElement {
    const box = document.createElement("div");
    box.className = "timeline-clip";
    box.draggable = true;
    box.dataset.id = String(clip.asset_id);
    if (this.selectedIds.has(clip.asset_id)) box.classList.add("selected");
    const length = clip.end_s - clip.start_s;
    box.innerHTML = `
      <div class="clip-thumbs" data-thumbs="${clip.asset_id}"></div>
      <div class="clip-label">#${clip.asset_id} &middot; ${clip.start_s}s&ndash;${clip.end_s}s (${length}s)</div>
      ${clip.rationale ? `<div class="clip-rationale" title="${clip.rationale}">trimmed by agent</div>` : ""}`;
    void this.fillThumbs(box, clip.asset_id);

    box.addEventListener("click", () => {
      if (this.selectedIds.has(clip.asset_id)) this.selectedIds.delete(clip.asset_id);
      else this.selectedIds.add(clip.asset_id);
      box.classList.toggle("selected");
    });
    box.addEventListener("dblclick", () => this.onOpenTrim(clip.asset_id));
    box.addEventListener("dragstart", (event) => {
      this.draggedId = clip.asset_id;
      event.dataTransfer?.setData("text/plain", String(clip.asset_id));
    });
    box.addEventListener("dragover", (event) => event.preventDefault());
    box.addEventListener("drop", (event) => {
      event.preventDefault();
      const raw = event.dataTransfer?.getData("text/plain");
      const dragged = raw ? Number(raw) : this.draggedId;
      if (dragged === null || dragged === clip.asset_id) return;
      void this.moveBefore(dragged, clip.asset_id);
    });
    return box;
  }

  private async fillThumbs(box: HTMLElement, assetId: number): Promise<void> {
    try {
      const { thumbnails } = await this.client.frames(this.sid, assetId);
      const holder = box.querySelector(`[data-thumbs="${assetId}"]`);
      if (holder) {
        holder.innerHTML = [thumbnails.start, thumbnails.mid, thumbnails.end]
          .map((src) => `<img src="${src}" alt="">`)
          .join("");
      }
    } catch {
      // thumbnails are cosmetic; ignore fetch failures
    }
  }

  /** Reorder by moving `draggedId` in front of `targetId`; emits the full
   * permutation the server expects. */
  async moveBefore(draggedId: number, targetId: number): Promise<void> {
    const order = this.clips.map((c) => c.asset_id).filter((id) => id !== draggedId);
    const at = order.indexOf(targetId);
    order.splice(at < 0 ? order.length : at, 0, draggedId);
    try {
      await this.client.timelineOp(this.sid, "reorder", { order });
    } catch (err) {
      this.onError(String(err));
    }
  }

  private bindButtons(): void {
    const actions: Record<string, () => Promise<void>> = {
      delete: async () => {
        if (this.selectedIds.size === 0) return;
        await this.client.timelineOp(this.sid, "remove", { ids: [...this.selectedIds] });
        this.selectedIds.clear();
      },
      clear: async () => {
        await this.client.timelineOp(this.sid, "remove", { all: true });
      },
      undo: async () => {
        await this.client.timelineOp(this.sid, "undo");
      },
      play: async () => {
        const { artifact } = await this.client.timelineOp(this.sid, "render");
        if (artifact) this.showPreview(artifact.total_duration_s);
      },
    };
    for (const [name, handler] of Object.entries(actions)) {
      this.root.querySelector(`[data-action="${name}"]`)!.addEventListener("click", () => {
        handler().catch((err) => this.onError(String(err)));
      });
    }
  }

  private showPreview(durationS: number): void {
    const holder = this.root.querySelector(".preview-holder") as HTMLElement;
    holder.innerHTML = `
      <video controls autoplay src="/api/sessions/${this.sid}/preview"></video>
      <div class="preview-note">Preview rendered: ${durationS}s</div>`;
  }
}
