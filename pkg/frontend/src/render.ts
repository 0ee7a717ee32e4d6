/** Pure HTML-string rendering of the view-model.
 *
 * Rendering only formats numbers from the fetched view (each carries a
 * data-value attribute so tests can assert the round-trip); no probability
 * arithmetic happens here beyond the alpha-threshold comparison the service
 * parameters define. The pending question's internal choice set is never
 * rendered: the answering human sees a free-text box only.
 */

import type { SessionViewModel } from "./model.js";
import type { DimensionView, MiEntry, SessionView } from "./types.js";

export function fmtProb(x: number): string {
  return x.toFixed(3);
}

export function fmtNats(x: number): string {
  return x.toFixed(4);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function statusBadge(status: string): string {
  const cls = status === "running" ? "running" : "terminal";
  return `<span class="badge ${cls}" data-status="${status}">${status}</span>`;
}

export function renderMarginals(dimensions: DimensionView[], alpha: number): string {
  const threshold = 1 - alpha;
  const blocks = dimensions.map((dim) => {
    const rows = dim.values
      .map((value) => {
        const highlight = value.probability >= threshold ? " converged" : "";
        const width = Math.round(value.probability * 100);
        return `
        <div class="bar-row${highlight}">
          <span class="bar-label">${escapeHtml(value.text)}</span>
          <span class="bar-track"><span class="bar-fill" style="width:${width}%"></span></span>
          <span class="bar-value" data-value="${fmtProb(value.probability)}">${fmtProb(value.probability)}</span>
        </div>`;
      })
      .join("");
    return `<section class="dimension" data-dim="${dim.id}">
      <h3>${escapeHtml(dim.name)}</h3>${rows}</section>`;
  });
  return `<div id="marginals">${blocks.join("")}</div>`;
}

export function renderEntropyGauge(view: SessionView): string {
  const minRounds =
    view.min_rounds === null
      ? '<span class="min-rounds" data-value="unbounded">unreachable by asking</span>'
      : `<span class="min-rounds" data-value="${view.min_rounds}">&ge; ${view.min_rounds} rounds to target</span>`;
  return `
  <div id="entropy-gauge">
    <div>entropy <b data-value="${fmtNats(view.entropy)}">${fmtNats(view.entropy)}</b> nats</div>
    <div>target <b data-value="${fmtNats(view.target_entropy)}">${fmtNats(view.target_entropy)}</b> nats</div>
    <div>gap <b data-value="${fmtNats(view.entropy_gap)}">${fmtNats(view.entropy_gap)}</b></div>
    ${minRounds}
  </div>`;
}

export function renderSparkline(history: { entropy: number }[]): string {
  if (history.length === 0) return '<svg id="sparkline"></svg>';
  const values = history.map((p) => p.entropy);
  const max = Math.max(...values, 1e-9);
  const step = values.length > 1 ? 100 / (values.length - 1) : 0;
  const points = values
    .map((v, i) => `${(i * step).toFixed(1)},${(30 - (v / max) * 28).toFixed(1)}`)
    .join(" ");
  return `<svg id="sparkline" viewBox="0 0 100 32" preserveAspectRatio="none">
    <polyline fill="none" stroke="currentColor" stroke-width="1.5" points="${points}"/></svg>`;
}

export function renderMiRanking(entries: MiEntry[]): string {
  if (entries.length === 0) {
    return '<div id="mi-ranking"><em>no unasked questions</em></div>';
  }
  const rows = entries
    .slice(0, 8)
    .map(
      (e) => `<li>${escapeHtml(e.question_id)} &rarr; ${escapeHtml(e.user_id)}
        <b data-value="${fmtNats(e.mi)}">${fmtNats(e.mi)}</b></li>`,
    )
    .join("");
  return `<ol id="mi-ranking">${rows}</ol>`;
}

export function renderAnswerProbabilities(probs: Record<string, number> | null): string {
  if (!probs) return "";
  const rows = Object.entries(probs)
    .sort((a, b) => b[1] - a[1])
    .map(
      ([answer, p]) => `<div class="bar-row"><span class="bar-label">${escapeHtml(answer)}</span>
        <span class="bar-value" data-value="${fmtProb(p)}">${fmtProb(p)}</span></div>`,
    )
    .join("");
  return `<section id="answer-probs"><h3>answer probabilities</h3>${rows}</section>`;
}

/** Free-text box only; the discrete choice set stays internal. */
export function renderQuestionPanel(model: SessionViewModel): string {
  const view = model.view;
  if (!view) return "";
  const action = model.primaryAction();
  if (view.status !== "running") return "";
  if (view.pending === null) {
    const disabled = action === "step" ? "" : " disabled";
    return `<section id="question-panel">
      <p><em>no question pending</em></p>
      <button id="step-button"${disabled}>advance the loop</button>
    </section>`;
  }
  const answerDisabled = action === "answer" ? "" : " disabled";
  return `<section id="question-panel">
    <p class="asked-user">for <b>${escapeHtml(view.pending.user_id)}</b>:</p>
    <p class="question-text">${escapeHtml(view.pending.question_text)}</p>
    <textarea id="answer-input" placeholder="answer in your own words"${answerDisabled}>${escapeHtml(model.pendingInput)}</textarea>
    <button id="answer-button"${answerDisabled}>send answer</button>
    <button id="step-button" disabled>advance the loop</button>
  </section>`;
}

export function renderFinalPanel(view: SessionView): string {
  if (view.status === "running" || view.final_answer === null) return "";
  return `<section id="final-panel">
    <h3>final answer</h3>
    <p id="final-answer">${escapeHtml(view.final_answer)}</p>
  </section>`;
}

export function renderSession(model: SessionViewModel): string {
  const view = model.view;
  if (!view) {
    return `<div id="app-root"><p id="banner">loading&hellip;</p></div>`;
  }
  const banner = model.banner
    ? `<p id="banner" class="warn">${escapeHtml(model.banner)}</p>`
    : "";
  const expandDisabled = model.expandEnabled() ? "" : " disabled";
  const expandTitle = view.expand_capped
    ? ` title="state cap reached (${view.total_states} of ${view.state_cap} states)"`
    : "";
  return `<div id="app-root">
  <header>
    ${statusBadge(view.status)}
    <span>round <b data-value="${view.t}">${view.t}</b></span>
    <span>asked <b data-value="${view.n_asked}">${view.n_asked}</b></span>
    <span>dimensions <b data-value="${view.dimensions.length}">${view.dimensions.length}</b></span>
    <span>states <b data-value="${view.total_states}">${view.total_states}</b></span>
    <button id="expand-button"${expandDisabled}${expandTitle}>explore a new dimension</button>
  </header>
  ${banner}
  ${renderEntropyGauge(view)}
  ${renderSparkline(model.entropyHistory)}
  ${renderQuestionPanel(model)}
  ${renderFinalPanel(view)}
  ${renderMarginals(view.dimensions, view.alpha)}
  ${renderAnswerProbabilities(view.answer_probabilities)}
  <h3>most informative next questions</h3>
  ${renderMiRanking(view.mi_ranking)}
</div>`;
}

/** Every number shown to the user, for round-trip checks against the view. */
export function displayedValues(html: string): string[] {
  const out: string[] = [];
  const re = /data-value="([^"]+)"/g;
  let match: RegExpExecArray | null;
  while ((match = re.exec(html)) !== null) {
    if (match[1] !== undefined) out.push(match[1]);
  }
  return out;
}
