import { ApiError, Client, splitExamples } from "./api.js";
import {
  UiSessionView,
  answerDelivered,
  answerRejected,
  applySnapshot,
  beginAnswer,
  conditionHolds,
  connectionLost,
  initialView,
  phaseLabel,
  sessionStarted,
  startingView,
} from "./state.js";

const POLL_INTERVAL_MS = 500;

const client = new Client("");
let view: UiSessionView = initialView();
let pollTimer: number | undefined;

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing element #${id}`);
  return element as T;
}

const validInput = byId<HTMLTextAreaElement>("valid-input");
const invalidInput = byId<HTMLTextAreaElement>("invalid-input");
const conditionalInput = byId<HTMLTextAreaElement>("conditional-input");
const startButton = byId<HTMLButtonElement>("start-button");
const formError = byId<HTMLElement>("form-error");
const statusLine = byId<HTMLElement>("status-line");
const questionPanel = byId<HTMLElement>("question-panel");
const questionPhase = byId<HTMLElement>("question-phase");
const questionText = byId<HTMLElement>("question-text");
const answerValid = byId<HTMLButtonElement>("answer-valid");
const answerInvalid = byId<HTMLButtonElement>("answer-invalid");
const resultPanel = byId<HTMLElement>("result-panel");
const resultRegex = byId<HTMLElement>("result-regex");
const resultConditions = byId<HTMLElement>("result-conditions");
const transcriptList = byId<HTMLElement>("transcript");
const retryBanner = byId<HTMLElement>("retry-banner");
const tryPanel = byId<HTMLElement>("try-panel");
const tryInput = byId<HTMLInputElement>("try-input");
const tryButton = byId<HTMLButtonElement>("try-button");
const tryOutput = byId<HTMLElement>("try-output");

function render() {
  formError.textContent = "";
  retryBanner.hidden = view.connectionError === null;
  if (view.connectionError !== null) {
    retryBanner.textContent = `connection problem: ${view.connectionError} (retrying)`;
  }

  const labels: Record<string, string> = {
    idle: "enter examples and start a session",
    starting: "starting…",
    running: "synthesizing…",
    awaiting_answer: "waiting for your answer",
    done: "done",
    failed: `failed: ${view.failure ?? "unknown reason"}`,
  };
  statusLine.textContent = labels[view.state] ?? view.state;
  statusLine.className = view.state;

  questionPanel.hidden = view.state !== "awaiting_answer" || view.question === null;
  if (view.question) {
    questionPhase.textContent = phaseLabel(view.question.phase);
    questionText.textContent = `"${view.question.text}"`;
  }

  resultPanel.hidden = view.result === null;
  tryPanel.hidden = view.result === null;
  if (view.result) {
    resultRegex.textContent = view.result.regex;
    resultConditions.textContent = view.result.conditions.length
      ? view.result.conditions.join("  ∧  ")
      : "(no capture conditions)";
  }

  transcriptList.innerHTML = "";
  for (const entry of view.transcript) {
    const item = document.createElement("li");
    item.textContent = `[${phaseLabel(entry.phase)}] "${entry.text}" → ${
      entry.answer ? "valid" : "invalid"
    }`;
    transcriptList.appendChild(item);
  }

  startButton.disabled = view.state === "starting" || view.state === "running" || view.state === "awaiting_answer";
}

function schedulePoll() {
  window.clearTimeout(pollTimer);
  pollTimer = window.setTimeout(poll, POLL_INTERVAL_MS);
}

async function poll() {
  if (!view.sessionId) return;
  try {
    const snapshot = await client.getSession(view.sessionId);
    view = applySnapshot(view, snapshot);
  } catch (error) {
    view = connectionLost(view, error instanceof Error ? error.message : String(error));
  }
  render();
  if (view.state === "running" || view.state === "awaiting_answer" || view.connectionError) {
    schedulePoll();
  }
}

async function startSession() {
  const valid = splitExamples(validInput.value);
  if (valid.length === 0) {
    formError.textContent = "at least one valid example is required";
    return;
  }
  view = startingView(view);
  render();
  try {
    const id = await client.createSession(
      valid,
      splitExamples(invalidInput.value),
      splitExamples(conditionalInput.value),
    );
    view = sessionStarted(view, id);
    render();
    schedulePoll();
  } catch (error) {
    view = { ...initialView(), state: "idle" };
    formError.textContent = error instanceof Error ? error.message : String(error);
    render();
  }
}

async function answer(isValid: boolean) {
  const next = beginAnswer(view, isValid);
  if (next === null) return; // double click or stale state
  view = next;
  render();
  try {
    await client.answer(view.sessionId!, isValid);
    view = answerDelivered(view);
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      view = answerRejected(view);
    } else {
      view = connectionLost(view, error instanceof Error ? error.message : String(error));
    }
  }
  render();
  schedulePoll();
}

async function tryCurrentInput() {
  if (!view.result) return;
  tryOutput.textContent = "…";
  try {
    const outcome = await client.evaluate(view.result.regex, view.result.conditions, tryInput.value);
    if (!outcome.matches) {
      tryOutput.textContent = "no match";
      tryOutput.className = "fail";
      return;
    }
    const parts = ["match"];
    (outcome.captures ?? []).forEach((value, index) => parts.push(`$${index} = ${value}`));
    for (const condition of view.result.conditions) {
      const holds = conditionHolds(condition, outcome.captures ?? []);
      parts.push(`${condition} ${holds ? "✓" : "✗"}`);
    }
    tryOutput.textContent = parts.join("   ");
    tryOutput.className = outcome.satisfies_conditions === false ? "fail" : "pass";
  } catch (error) {
    tryOutput.textContent = error instanceof Error ? error.message : String(error);
    tryOutput.className = "fail";
  }
}

startButton.addEventListener("click", () => void startSession());
answerValid.addEventListener("click", () => void answer(true));
answerInvalid.addEventListener("click", () => void answer(false));
tryButton.addEventListener("click", () => void tryCurrentInput());
tryInput.addEventListener("keydown", (event) => {
  if (event.key === "Enter") void tryCurrentInput();
});

render();
