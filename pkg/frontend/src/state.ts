/** Pure workspace state: everything the DOM renders, nothing it invents.
 *
 * The exposed/committed streams always come from a service response, never
 * from local prediction, so the view can never show a source token the
 * service has not revealed.
 */

import type { SessionState } from "./api.js";

export interface WorkspaceState {
  sessionId: string;
  exposed: string[];
  committed: string[];
  pending: string;
  finishable: boolean;
  finished: boolean;
  sourceLen: number;
  readsDone: number;
  seq: number;
  actions: [string, string][];
  error: string | null;
}

export function fromSession(
  session: SessionState,
  pending = "",
  error: string | null = null,
): WorkspaceState {
  return {
    sessionId: session.session_id,
    exposed: [...session.exposed],
    committed: [...session.target_stream],
    pending,
    finishable: session.finishable,
    finished: session.state === "finished",
    sourceLen: session.source_len,
    readsDone: session.reads_done,
    seq: session.seq,
    actions: session.actions.map((a) => [...a] as [string, string]),
    error,
  };
}

/** Returns a validation message, or null when the text is a legal token. */
export function validateToken(text: string): string | null {
  const trimmed = text.trim();
  if (trimmed.length === 0) return "Type a target token before writing.";
  if (/\s/.test(trimmed)) return "One token at a time: no spaces inside a token.";
  return null;
}

/** Returns a validation message, or null when the score is a legal rating. */
export function validateScore(value: number): string | null {
  if (!Number.isInteger(value)) return "Score must be a whole number.";
  if (value < 1 || value > 5) return "Score must be between 1 and 5.";
  return null;
}

/** Splits a pasted source sentence into tokens; null message when usable. */
export function parseSourceSentence(text: string): { tokens: string[]; error: string | null } {
  const tokens = text.split(/\s+/).filter((t) => t.length > 0);
  if (tokens.length === 0) {
    return { tokens: [], error: "Paste a tokenized source sentence first." };
  }
  return { tokens, error: null };
}
