/**
 * Pure event-replay model. UI state is a function of the replayed event log
 * plus in-flight local input; there is no UI-only authoritative state, so
 * feeding a session's full log to an empty model reproduces the server view.
 */

import type { ChatPayload, ClipState, PlanPayload, TrimPayload, UiEvent } from "./types";

export interface UiState {
  galleryOrder: number[];
  selection: number[];
  timeline: ClipState[];
  chat: ChatPayload[];
  plan: PlanPayload;
  lastTrim: TrimPayload | null;
  lastSeq: number;
}

export function emptyState(): UiState {
  return {
    galleryOrder: [],
    selection: [],
    timeline: [],
    chat: [],
    plan: { goal: null, actions: [], cursor: 0, mode: "planning" },
    lastTrim: null,
    lastSeq: 0,
  };
}

export function applyEvent(state: UiState, event: UiEvent): UiState {
  switch (event.kind) {
    case "chat_message":
      state.chat.push({ ...event.payload });
      break;
    case "gallery_order":
      state.galleryOrder = [...event.payload.order];
      state.selection = [...event.payload.selection];
      break;
    case "timeline_state":
      state.timeline = event.payload.clips.map((c) => ({ ...c }));
      break;
    case "plan_status":
      state.plan = { ...event.payload, actions: event.payload.actions.map((a) => ({ ...a })) };
      break;
    case "trim_window":
      state.lastTrim = { ...event.payload };
      break;
  }
  state.lastSeq = Math.max(state.lastSeq, event.seq);
  return state;
}

export function replay(events: UiEvent[]): UiState {
  const state = emptyState();
  for (const event of events) applyEvent(state, event);
  return state;
}

type Listener = (state: UiState) => void;

/** Single event-stream consumer: events come in, listeners re-render. */
export class Store {
  readonly state = emptyState();
  private listeners: Listener[] = [];

  applyAll(events: UiEvent[]): void {
    if (events.length === 0) return;
    for (const event of events) applyEvent(this.state, event);
    this.notify();
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
    listener(this.state);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }
}
