/** Browser bootstrap: wires the rendered HTML to the service.
 *
 * Poll-on-action plus a light interval refresh; no push channel. Query
 * parameters: ?api=<base url> ?session=<existing id> ?fixture=<name>.
 */

import { SessionApi } from "./api.js";
import { SessionViewModel } from "./model.js";
import { renderSession } from "./render.js";

const REFRESH_MS = 5000;

const params = new URLSearchParams(window.location.search);
const api = new SessionApi(params.get("api") ?? "http://127.0.0.1:8000");
const fixture = params.get("fixture") ?? "medical";

const DEFAULT_INSTANCE = {
  prompt: "I've been having headaches lately. What could I do?",
  context: "Adult patient, no prior diagnoses on file.",
  users: ["patient"],
  num_dims: 2,
  num_questions: 3,
};

async function attach(): Promise<SessionViewModel> {
  const existing = params.get("session");
  const sessionId =
    existing ?? (await api.createSession(DEFAULT_INSTANCE, `scripted:${fixture}`));
  const model = new SessionViewModel(api, sessionId);
  await model.refresh();
  return model;
}

function draw(model: SessionViewModel, root: HTMLElement): void {
  root.innerHTML = renderSession(model);
  const input = root.querySelector<HTMLTextAreaElement>("#answer-input");
  input?.addEventListener("input", () => {
    model.pendingInput = input.value;
  });
  root.querySelector("#answer-button")?.addEventListener("click", () => {
    void model.submitAnswer().then(() => draw(model, root));
  });
  root.querySelector("#step-button")?.addEventListener("click", () => {
    void model.stepLoop().then(() => draw(model, root));
  });
  root.querySelector("#expand-button")?.addEventListener("click", () => {
    void model.forceExpand().then(() => draw(model, root));
  });
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  try {
    const model = await attach();
    draw(model, root);
    window.setInterval(() => {
      if (model.busy) return;
      void model
        .refresh()
        .catch(() => undefined)
        .then(() => draw(model, root));
    }, REFRESH_MS);
  } catch (err) {
    root.innerHTML = `<p id="banner" class="warn">could not reach the session service: ${String(err)}</p>`;
  }
}

void boot();
