/**
 * Language-augmented gallery grid: thumbnail, generated title, duration label,
 * summary tooltip on hover. Cards already on the timeline render faded;
 * selected cards render highlighted. Order always mirrors the latest
 * gallery_order event.
 */

import { ApiClient } from "./client";
import type { UiState } from "./model";
import type { GalleryCard } from "./types";

function formatDuration(seconds: number): string {
  const m = Math.floor(seconds / 60);
  const s = seconds % 60;
  return `${m}:${String(s).padStart(2, "0")}`;
}

export class GalleryView {
  private cards = new Map<number, GalleryCard>();
  private grid: HTMLElement;

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
    private sid: string,
    private onError: (message: string) => void,
  ) {
    this.root.innerHTML = `
      <div class="panel-header">
        <span>Video Gallery</span>
        <span class="panel-actions">
          <button data-action="toggle-all">Select/Deselect All</button>
          <button data-action="add">Add to Timeline</button>
        </span>
      </div>
      <div class="gallery-grid"></div>`;
    this.grid = this.root.querySelector(".gallery-grid") as HTMLElement;
    this.root.querySelector('[data-action="toggle-all"]')!.addEventListener("click", () => {
      void this.toggleAll();
    });
    this.root.querySelector('[data-action="add"]')!.addEventListener("click", () => {
      void this.addSelected();
    });
  }

  async refreshCards(): Promise<void> {
    const { cards } = await this.client.gallery(this.sid);
    this.cards = new Map(cards.map((c) => [c.id, c]));
  }

  render(state: UiState): void {
    const onTimeline = new Set(state.timeline.map((c) => c.asset_id));
    const selected = new Set(state.selection);
    this.grid.replaceChildren(
      ...state.galleryOrder.map((id) => this.renderCard(id, onTimeline, selected)),
    );
  }

  private renderCard(id: number, onTimeline: Set<number>, selected: Set<number>): HTMLElement {
    const info = this.cards.get(id);
    const card = document.createElement("div");
    card.className = "gallery-card";
    card.dataset.id = String(id);
    if (onTimeline.has(id)) card.classList.add("faded");
    if (selected.has(id)) card.classList.add("selected");
    const title = info?.title ?? `Video ${id}`;
    const duration = info ? formatDuration(info.duration_s) : "";
    card.innerHTML = `
      <img class="thumb" alt="${title}" src="${info?.thumbnail ?? ""}">
      <div class="card-label"><span class="card-title">${title}</span><span class="card-duration">${duration}</span></div>
      <div class="summary-tooltip">${info?.summary ?? ""}</div>`;
    card.addEventListener("click", () => {
      void this.toggle(id, !selected.has(id));
    });
    return card;
  }

  private async toggle(id: number, select: boolean): Promise<void> {
    try {
      await this.client.timelineOp(this.sid, "select", { ids: [id], selected: select });
    } catch (err) {
      this.onError(String(err));
    }
  }

  private async toggleAll(): Promise<void> {
    const cards = [...this.grid.querySelectorAll(".gallery-card")];
    const ids = cards.map((el) => Number((el as HTMLElement).dataset.id));
    const allSelected =
      cards.length > 0 && cards.every((el) => el.classList.contains("selected"));
    try {
      await this.client.timelineOp(this.sid, "select", { ids, selected: !allSelected });
    } catch (err) {
      this.onError(String(err));
    }
  }

  private async addSelected(): Promise<void> {
    const selected = [...this.grid.querySelectorAll(".gallery-card.selected")].map((el) =>
      Number((el as HTMLElement).dataset.id),
    );
    if (selected.length === 0) return;
    try {
      await this.client.timelineOp(this.sid, "add", { ids: selected });
    } catch (err) {
      this.onError(String(err));
    }
  }
}
