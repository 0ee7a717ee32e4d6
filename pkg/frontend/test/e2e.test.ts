/** End-to-end smoke: the dashboard stack against a live scripted-oracle service.
 *
 * Spawns the Python session service with the repository's fixtures, then
 * drives a full session through the real HTTP client, view-model, and
 * renderer: render the pending question, submit free-form answers, watch
 * marginals and entropy move, and reach the terminal state with the final
 * answer panel. Asserts the free-form-only input rule throughout.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { SessionViewModel } from "../src/model.js";
import { renderSession } from "../src/render.js";

const repoRoot = join(dirname(fileURLToPath(import.meta.url)), "..", "..");
const port = 18750 + Math.floor(Math.random() * 1000);
const baseUrl = `http://127.0.0.1:${port}`;

let server: ChildProcess;

async function waitForHealth(api: SessionApi, attempts = 60): Promise<void> {
  for (let i = 0; i < attempts; i++) {
    if (await api.health()) return;
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
  throw new Error("session service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "balar", "serve", "--port", String(port), "--fixtures", join(repoRoot, "fixtures")],
    {
      env: { ...process.env, PYTHONPATH: join(repoRoot, "src") },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );
  await waitForHealth(new SessionApi(baseUrl));
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe("dashboard against a live scripted session", () => {
  it("runs the full loop: question, answers, expansion, final answer", async () => {
    const fixture = JSON.parse(
      readFileSync(join(repoRoot, "fixtures", "medical.json"), "utf-8"),
    ) as {
      instance: { prompt: string; users: string[] };
      user_answers: Record<string, string>;
    };
    const api = new SessionApi(baseUrl);
    const sessionId = await api.createSession(fixture.instance, "scripted:medical");
    const model = new SessionViewModel(api, sessionId);
    await model.refresh();

    expect(model.view?.status).toBe("running");
    expect(model.view?.total_states).toBe(6);
    const initialEntropy = model.view!.entropy;
    const initialDims = model.view!.dimensions.length;

    // advance: the service selects the max-MI question and issues it
    await model.stepLoop();
    expect(model.view?.pending).not.toBeNull();
    const firstPending = model.view!.pending!;
    let html = renderSession(model);
    expect(html).toContain(firstPending.question_text);
    expect(html).toContain('id="answer-input"');
    // the internal choice set exists in the API payload but is never rendered
    expect(firstPending.choices.length).toBeGreaterThan(1);
    for (const choice of firstPending.choices) {
      expect(html).not.toContain(`>${choice.text}<`);
    }

    // answer with the scripted free-form text and observe the belief move
    const marginalBefore = model.view!.dimensions.map((d) => d.max_probability);
    model.pendingInput =
      fixture.user_answers[`${firstPending.question_id}/${firstPending.user_id}`]!;
    await model.submitAnswer();
    expect(model.view?.pending).toBeNull();
    expect(model.view?.history_length).toBe(1);
    expect(model.view!.entropy).toBeLessThan(initialEntropy);
    const marginalAfter = model.view!.dimensions.map((d) => d.max_probability);
    expect(marginalAfter).not.toEqual(marginalBefore);

    // play the session out; each answer feeds the next selected question
    let expansions = 0;
    for (let guard = 0; guard < 30 && model.view!.status === "running"; guard++) {
      if (model.view!.pending) {
        const pending = model.view!.pending;
        html = renderSession(model);
        for (const choice of pending.choices) {
          expect(html).not.toContain(`>${choice.text}<`);
        }
        model.pendingInput =
          fixture.user_answers[`${pending.question_id}/${pending.user_id}`]!;
        await model.submitAnswer();
      } else {
        const dimsBefore = model.view!.dimensions.length;
        await model.stepLoop();
        if (model.view!.dimensions.length > dimsBefore) expansions++;
      }
    }

    expect(model.view!.status).toBe("converged-marginal");
    expect(expansions).toBe(1);
    expect(model.view!.dimensions.length).toBe(initialDims + 1);
    expect(model.view!.final_answer).toMatch(/migraine without aura/i);

    html = renderSession(model);
    expect(html).toContain('id="final-panel"');
    expect(html).toContain("migraine without aura");
    expect(html).not.toContain('id="answer-input"'); // inputs disabled at terminal
    expect(model.primaryAction()).toBe("none");

    // transcript is complete and ordered
    const transcript = await api.transcript(sessionId);
    const kinds = (transcript.events as { kind: string }[]).map((e) => e.kind);
    expect(kinds[0]).toBe("init");
    expect(kinds).toContain("expand");
    expect(kinds[kinds.length - 1]).toBe("final-answer");
  }, 60_000);

  it("manual expansion grows the dimension list and raises entropy by the prior's entropy", async () => {
    const fixture = JSON.parse(
      readFileSync(join(repoRoot, "fixtures", "medical.json"), "utf-8"),
    ) as { instance: { prompt: string; users: string[] } };
    const api = new SessionApi(baseUrl);
    const sessionId = await api.createSession(fixture.instance, "scripted:medical");
    const model = new SessionViewModel(api, sessionId);
    await model.refresh();

    const before = model.view!;
    expect(model.expandEnabled()).toBe(true);
    await model.forceExpand();
    const after = model.view!;
    expect(after.dimensions.length).toBe(before.dimensions.length + 1);
    // entropy delta equals the new dimension's marginal entropy (additivity)
    const newDim = after.dimensions[after.dimensions.length - 1]!;
    const priorEntropy = -newDim.values.reduce(
      (acc, v) => acc + (v.probability > 0 ? v.probability * Math.log(v.probability) : 0),
      0,
    );
    expect(Math.abs(after.entropy - before.entropy - priorEntropy)).toBeLessThan(1e-9);
  }, 60_000);

  it("reports 409 recovery when the session advances elsewhere", async () => {
    const fixture = JSON.parse(
      readFileSync(join(repoRoot, "fixtures", "medical.json"), "utf-8"),
    ) as { instance: { prompt: string; users: string[] } };
    const api = new SessionApi(baseUrl);
    const sessionId = await api.createSession(fixture.instance, "scripted:medical");
    const model = new SessionViewModel(api, sessionId);
    await model.refresh();
    // another client issues the ask first
    await api.step(sessionId);
    await model.stepLoop(); // our stale step hits 409 and refetches
    expect(model.banner).toContain("advanced elsewhere");
    expect(model.view!.pending).not.toBeNull();
  }, 60_000);
});
