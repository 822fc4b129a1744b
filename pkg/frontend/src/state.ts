// Pure view-state: a function of the server snapshots and local actions, so
// reloading a session and re-polling reproduces the same view.

import type { Question, SessionResource, SessionResult } from "./api.js";

export interface TranscriptEntry {
  text: string;
  phase: Question["phase"];
  answer: boolean;
}

export interface UiSessionView {
  sessionId: string | null;
  state: "idle" | "starting" | "running" | "awaiting_answer" | "done" | "failed";
  question: Question | null;
  result: SessionResult | null;
  stats: Record<string, unknown>;
  failure: string | null;
  transcript: TranscriptEntry[];
  answering: boolean;
  connectionError: string | null;
}

export function initialView(): UiSessionView {
  return {
    sessionId: null,
    state: "idle",
    question: null,
    result: null,
    stats: {},
    failure: null,
    transcript: [],
    answering: false,
    connectionError: null,
  };
}

export function startingView(view: UiSessionView): UiSessionView {
  return { ...initialView(), state: "starting" };
}

export function sessionStarted(view: UiSessionView, id: string): UiSessionView {
  return { ...view, sessionId: id, state: "running", connectionError: null };
}

export function applySnapshot(view: UiSessionView, snapshot: SessionResource): UiSessionView {
  return {
    ...view,
    sessionId: snapshot.id,
    state: snapshot.state,
    question: snapshot.question ?? null,
    result: snapshot.result ?? null,
    stats: snapshot.stats ?? {},
    failure: snapshot.failure ?? null,
    answering: snapshot.state === "awaiting_answer" ? view.answering : false,
    connectionError: null,
  };
}

/** Guard against double clicks: returns null when an answer is in flight or
 * no question is displayed. */
export function beginAnswer(view: UiSessionView, isValid: boolean): UiSessionView | null {
  if (view.state !== "awaiting_answer" || view.question === null || view.answering) {
    return null;
  }
  return {
    ...view,
    answering: true,
    state: "running",
    transcript: [
      ...view.transcript,
      { text: view.question.text, phase: view.question.phase, answer: isValid },
    ],
    question: null,
  };
}

export function answerDelivered(view: UiSessionView): UiSessionView {
  return { ...view, answering: false };
}

export function answerRejected(view: UiSessionView): UiSessionView {
  // a 409 means the server state moved on; drop the guard and re-poll
  return { ...view, answering: false };
}

export function connectionLost(view: UiSessionView, message: string): UiSessionView {
  return { ...view, connectionError: message };
}

export function phaseLabel(phase: Question["phase"]): string {
  return phase === "regex" ? "pattern question" : "value question";
}

/** Evaluate one rendered condition ("$0 <= 31") against captured values. */
export function conditionHolds(condition: string, captures: number[]): boolean {
  const match = condition.match(/^\$(\d+) (<=|>=) (-?\d+)$/);
  if (!match) return false;
  const value = captures[Number(match[1])];
  if (value === undefined) return false;
  const bound = Number(match[3]);
  return match[2] === "<=" ? value <= bound : value >= bound;
}
