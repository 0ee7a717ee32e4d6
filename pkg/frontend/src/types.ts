/** Wire types mirroring the session service's view JSON. */

export interface DimensionValueView {
  id: string;
  text: string;
  probability: number;
}

export interface DimensionView {
  id: string;
  name: string;
  values: DimensionValueView[];
  max_probability: number;
}

export interface ChoiceView {
  id: string;
  text: string;
}

/** The pending question; `choices` are internal and must never be rendered. */
export interface PendingView {
  question_id: string;
  user_id: string;
  question_text: string;
  choices: ChoiceView[];
  issued_at: number;
}

export interface MiEntry {
  question_id: string;
  user_id: string;
  mi: number;
}

export interface SessionView {
  session_id: string;
  status: string;
  t: number;
  n_asked: number;
  alpha: number;
  beta: number;
  entropy: number;
  target_entropy: number;
  entropy_gap: number;
  min_rounds: number | null;
  total_states: number;
  state_cap: number;
  expand_capped: boolean;
  dimensions: DimensionView[];
  mi_ranking: MiEntry[];
  pending: PendingView | null;
  answer_probabilities: Record<string, number> | null;
  history_length: number;
  final_answer: string | null;
}

export interface InstancePayload {
  prompt: string;
  context?: string;
  users?: string[];
  answer_set?: string[] | null;
  num_dims?: number;
  num_questions?: number;
}
