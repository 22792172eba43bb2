/** Wire types for the session API and its event stream. */

export interface ChatPayload {
  role: "user" | "agent";
  content: string;
}

export interface GalleryPayload {
  order: number[];
  selection: number[];
  distances?: [number, number][];
}

export interface ClipState {
  asset_id: number;
  position: number;
  start_s: number;
  end_s: number;
  rationale: string | null;
}

export interface TimelinePayload {
  clips: ClipState[];
}

export interface TrimPayload {
  asset_id: number;
  start_s: number;
  end_s: number;
  rationale: string | null;
  matched: boolean;
}

export type ActionStatus = "proposed" | "approved" | "executed" | "cancelled";

export interface PlanAction {
  name: string;
  context: string;
  status: ActionStatus;
}

export interface PlanPayload {
  goal: string | null;
  actions: PlanAction[];
  cursor: number;
  mode: "planning" | "executing";
}

export type UiEvent = { seq: number } & (
  | { kind: "chat_message"; payload: ChatPayload }
  | { kind: "gallery_order"; payload: GalleryPayload }
  | { kind: "timeline_state"; payload: TimelinePayload }
  | { kind: "trim_window"; payload: TrimPayload }
  | { kind: "plan_status"; payload: PlanPayload }
);

export interface GalleryCard {
  id: number;
  title: string;
  summary: string;
  duration_s: number;
  selected: boolean;
  on_timeline: boolean;
  thumbnail: string;
}

export interface TrimCommandResult {
  start_s: number;
  end_s: number;
  rationale: string;
  matched: boolean;
}
