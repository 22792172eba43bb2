/**
 * Agent chat: conversation, the current plan with per-step status, and the
 * input box. Submitting empty input (plain enter) approves the next step; the
 * visible approve button sends the same empty-chat call.
 */

import { ApiClient } from "./client";
import type { UiState } from "./model";
import type { PlanPayload } from "./types";

const STATUS_LABEL: Record<string, string> = {
  proposed: "awaiting approval",
  approved: "running",
  executed: "done",
  cancelled: "cancelled",
};

export class ChatView {
  private messages: HTMLElement;
  private planPanel: HTMLElement;
  private input: HTMLInputElement;
  private pending = false;

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
    private sid: string,
    private onError: (message: string) => void,
  ) {
    this.root.innerHTML = `
      <div class="panel-header"><span>Video Editing Agent</span></div>
      <div class="chat-messages"></div>
      <div class="plan-panel"></div>
      <div class="chat-input-row">
        <input class="chat-input" type="text"
               placeholder="Describe an editing goal; press enter on empty input to approve">
        <button class="chat-approve">Approve next step</button>
      </div>`;
    this.messages = this.root.querySelector(".chat-messages") as HTMLElement;
    this.planPanel = this.root.querySelector(".plan-panel") as HTMLElement;
    this.input = this.root.querySelector(".chat-input") as HTMLInputElement;

    this.input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") void this.submit();
    });
    this.root.querySelector(".chat-approve")!.addEventListener("click", () => {
      void this.approve();
    });
  }

  async submit(): Promise<void> {
    if (this.pending) return;
    const text = this.input.value;
    this.input.value = "";
    await this.send(text);
  }

  async approve(): Promise<void> {
    await this.send("");
  }

  private async send(text: string): Promise<void> {
    this.pending = true;
    try {
      // local echo only for the typed text; authoritative state re-arrives as events
      if (text.trim() !== "") this.echo(text);
      await this.client.postChat(this.sid, text);
    } catch (err) {
      this.onError(String(err));
    } finally {
      this.pending = false;
    }
  }

  private echo(text: string): void {
    const el = document.createElement("div");
    el.className = "chat-message user local-echo";
    el.textContent = text;
    this.messages.appendChild(el);
  }

  render(state: UiState): void {
    this.messages.replaceChildren(
      ...state.chat.map((message) => {
        const el = document.createElement("div");
        el.className = `chat-message ${message.role}`;
        el.textContent = message.content;
        return el;
      }),
    );
    this.messages.scrollTop = this.messages.scrollHeight;
    this.renderPlan(state.plan);
  }

  private renderPlan(plan: PlanPayload): void {
    if (!plan.goal) {
      this.planPanel.innerHTML = "";
      return;
    }
    const steps = plan.actions
      .map((action, i) => {
        const current = plan.mode === "executing" && i === plan.cursor ? " current" : "";
        const context = action.context ? `: ${action.context}` : "";
        return `<li class="plan-step ${action.status}${current}">
          <span class="step-name">${action.name}</span>${context}
          <span class="step-status">${STATUS_LABEL[action.status] ?? action.status}</span></li>`;
      })
      .join("");
    this.planPanel.innerHTML = `
      <div class="plan-goal">Goal: ${plan.goal}</div>
      <ol class="plan-steps">${steps}</ol>`;
  }
}
