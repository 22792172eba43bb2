/** Boot: open a session for the project named in the query string, replay the
 * initial events into the store, and keep polling for new ones. */

import { ApiClient } from "./client";
import { ChatView } from "./chat";
import { GalleryView } from "./gallery";
import { Store } from "./model";
import { TimelineView } from "./timeline";
import { TrimDialog } from "./trimDialog";

const POLL_INTERVAL_MS = 800;

function showError(message: string): void {
  const bar = document.getElementById("error-bar");
  if (!bar) return;
  bar.textContent = message;
  bar.classList.add("visible");
  setTimeout(() => bar.classList.remove("visible"), 5000);
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const project = params.get("project");
  if (!project) {
    showError("Open with ?project=<path-to-project-directory>");
    return;
  }

  const client = new ApiClient();
  const store = new Store();
  const { session_id: sid, events } = await client.openSession(project);

  const trimDialog = new TrimDialog(client, sid, showError);
  const gallery = new GalleryView(
    document.getElementById("gallery")!, client, sid, showError,
  );
  const timeline = new TimelineView(
    document.getElementById("timeline")!,
    client,
    sid,
    (assetId) => {
      const clip = store.state.timeline.find((c) => c.asset_id === assetId);
      if (clip) void trimDialog.open(clip);
    },
    showError,
  );
  const chat = new ChatView(document.getElementById("chat")!, client, sid, showError);

  await gallery.refreshCards();
  store.subscribe((state) => {
    gallery.render(state);
    timeline.render(state);
    chat.render(state);
    if (state.lastTrim) trimDialog.showResult(state.lastTrim);
  });
  store.applyAll(events);

  const poll = async () => {
    try {
      const { events: fresh } = await client.pollEvents(sid, store.state.lastSeq);
      store.applyAll(fresh);
    } catch {
      // transient; the next poll replays from lastSeq
    }
    window.setTimeout(poll, POLL_INTERVAL_MS);
  };
  window.setTimeout(poll, POLL_INTERVAL_MS);
}

boot().catch((err) => showError(String(err)));
