import { describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { SessionViewModel } from "../src/model.js";
import {
  displayedValues,
  fmtNats,
  fmtProb,
  renderMarginals,
  renderSession,
} from "../src/render.js";
import type { SessionView } from "../src/types.js";

function sampleView(overrides: Partial<SessionView> = {}): SessionView {
  return {
    session_id: "abc",
    status: "running",
    t: 3,
    n_asked: 2,
    alpha: 0.1,
    beta: 1.0,
    entropy: 1.2345,
    target_entropy: 0.9876,
    entropy_gap: 0.2469,
    min_rounds: 2,
    total_states: 6,
    state_cap: 4096,
    expand_capped: false,
    dimensions: [
      {
        id: "d1",
        name: "Severity",
        values: [
          { id: "v1", text: "mild", probability: 0.92 },
          { id: "v2", text: "severe", probability: 0.08 },
        ],
        max_probability: 0.92,
      },
    ],
    mi_ranking: [{ question_id: "q2", user_id: "patient", mi: 0.1931 }],
    pending: null,
    answer_probabilities: null,
    history_length: 2,
    final_answer: null,
    ...overrides,
  };
}

function modelWith(view: SessionView): SessionViewModel {
  const model = new SessionViewModel(new SessionApi("http://unused"), view.session_id);
  model.view = view;
  model.entropyHistory = [{ t: view.t, entropy: view.entropy }];
  return model;
}

const PENDING = {
  question_id: "q1",
  user_id: "patient",
  question_text: "Does resting help?",
  choices: [
    { id: "c1", text: "SECRET-CHOICE-YES" },
    { id: "c2", text: "SECRET-CHOICE-NO" },
  ],
  issued_at: 3,
};

describe("choice confidentiality", () => {
  it("never renders the discrete choice set of a pending question", () => {
    const html = renderSession(modelWith(sampleView({ pending: PENDING })));
    expect(html).toContain("Does resting help?");
    expect(html).not.toContain("SECRET-CHOICE-YES");
    expect(html).not.toContain("SECRET-CHOICE-NO");
    expect(html).toContain("answer-input"); // free-text box instead
  });
});

describe("primary action exclusivity", () => {
  it("enables only the answer box while an ask is pending", () => {
    const model = modelWith(sampleView({ pending: PENDING }));
    expect(model.primaryAction()).toBe("answer");
    const html = renderSession(model);
    expect(html).toMatch(/<textarea id="answer-input"[^>]*>(?!.*disabled)/);
    expect(html).toContain('<button id="step-button" disabled>');
  });

  it("enables only the step button when nothing is pending", () => {
    const model = modelWith(sampleView());
    expect(model.primaryAction()).toBe("step");
    const html = renderSession(model);
    expect(html).toContain('<button id="step-button">');
    expect(html).not.toContain("answer-input");
  });

  it("disables every primary action on a terminal session", () => {
    const model = modelWith(
      sampleView({ status: "converged-marginal", final_answer: "rest and hydrate" }),
    );
    expect(model.primaryAction()).toBe("none");
    const html = renderSession(model);
    expect(html).not.toContain('id="step-button"');
    expect(html).not.toContain('id="answer-input"');
    expect(html).toContain('id="final-panel"');
    expect(html).toContain("rest and hydrate");
  });
});

describe("marginal convergence highlight", () => {
  it("flags bars at or above 1 - alpha", () => {
    const html = renderMarginals(sampleView().dimensions, 0.1);
    // 0.92 >= 0.9 gets the highlight, 0.08 does not
    const rows = html.split("bar-row");
    expect(rows[1]).toContain("converged");
    expect(rows[2]).not.toContain("converged");
  });
});

describe("number round-trip", () => {
  it("displays only values taken verbatim from the view, formatted", () => {
    const view = sampleView();
    const html = renderSession(modelWith(view));
    const shown = new Set(displayedValues(html));
    const allowed = new Set<string>([
      String(view.t),
      String(view.n_asked),
      String(view.dimensions.length),
      String(view.total_states),
      String(view.min_rounds),
      fmtNats(view.entropy),
      fmtNats(view.target_entropy),
      fmtNats(view.entropy_gap),
      ...view.dimensions.flatMap((d) => d.values.map((v) => fmtProb(v.probability))),
      ...view.mi_ranking.map((e) => fmtNats(e.mi)),
    ]);
    for (const value of shown) {
      expect(allowed.has(value), `unexpected displayed value ${value}`).toBe(true);
    }
    // and the headline quantities are all actually shown
    expect(shown.has(fmtNats(view.entropy))).toBe(true);
    expect(shown.has(fmtProb(0.92))).toBe(true);
  });

  it("renders the unbounded min-rounds sentinel", () => {
    const html = renderSession(modelWith(sampleView({ min_rounds: null })));
    expect(html).toContain("unreachable by asking");
  });
});

describe("expand control", () => {
  it("is enabled while running with cap headroom", () => {
    const html = renderSession(modelWith(sampleView()));
    expect(html).toContain('<button id="expand-button">');
  });

  it("is disabled with a cap tooltip when capped", () => {
    const html = renderSession(
      modelWith(sampleView({ expand_capped: true, total_states: 4096 })),
    );
    expect(html).toMatch(/<button id="expand-button" disabled title="state cap reached/);
  });
});
