// Typed client for the synthesis session API.

export type Phase = "regex" | "captures";
export type SessionState = "running" | "awaiting_answer" | "done" | "failed";

export interface Question {
  text: string;
  phase: Phase;
}

export interface SessionResult {
  regex: string;
  conditions: string[];
}

export interface SessionResource {
  id: string;
  state: SessionState;
  question: Question | null;
  result: SessionResult | null;
  stats: Record<string, unknown>;
  failure?: string | null;
  best_effort?: boolean;
}

export interface EvalResult {
  matches: boolean;
  captures: number[] | null;
  satisfies_conditions: boolean | null;
}

export interface SessionOptions {
  mode?: "multitree" | "ktree";
  split?: boolean;
  pruning?: boolean;
  timeout?: number;
  question_cap?: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body.detail ?? body);
  } catch {
    return response.statusText || `HTTP ${response.status}`;
  }
}

export class Client {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return response;
  }

  async createSession(
    valid: string[],
    invalid: string[],
    conditionalInvalid: string[],
    options: SessionOptions = {},
  ): Promise<string> {
    const response = await this.request("/api/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        valid,
        invalid,
        conditional_invalid: conditionalInvalid,
        options,
      }),
    });
    const body = await response.json();
    return body.id as string;
  }

  async getSession(id: string): Promise<SessionResource> {
    const response = await this.request(`/api/sessions/${id}`);
    return (await response.json()) as SessionResource;
  }

  async answer(id: string, isValid: boolean): Promise<void> {
    await this.request(`/api/sessions/${id}/answer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ valid: isValid }),
    });
  }

  async evaluate(regex: string, conditions: string[], input: string): Promise<EvalResult> {
    const response = await this.request("/api/eval", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ regex, conditions, input }),
    });
    return (await response.json()) as EvalResult;
  }
}

export function splitExamples(text: string): string[] {
  return text
    .split("\n")
    .map((line) => line.replace(/\r$/, ""))
    .filter((line) => line.length > 0);
}
