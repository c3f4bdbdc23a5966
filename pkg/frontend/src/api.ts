import type {
  BallotRecord,
  CreateSessionRequest,
  EstimateView,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }
}

async function parseError(res: Response): Promise<never> {
  let code = "unknown";
  let message = `${res.status}`;
  try {
    const body = await res.json();
    if (body && body.error) {
      code = body.error.code;
      message = body.error.message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, code, message);
}

/** Thin client for the audit-session service. */
export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!res.ok) {
      await parseError(res);
    }
    if (res.status === 204) {
      return undefined as T;
    }
    return (await res.json()) as T;
  }

  createSession(req: CreateSessionRequest): Promise<SessionView> {
    return this.request("POST", "/sessions", req);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  listSessions(): Promise<{ sessions: unknown[] }> {
    return this.request("GET", "/sessions");
  }

  postBallots(id: string, ballots: BallotRecord[]): Promise<{ sampleSize: number; status: string }> {
    return this.request("POST", `/sessions/${id}/ballots`, { ballots });
  }

  estimate(id: string, draws?: number): Promise<EstimateView & { status: string }> {
    return this.request("POST", `/sessions/${id}/estimate`, draws ? { draws } : {});
  }

  deleteSession(id: string): Promise<void> {
    return this.request("DELETE", `/sessions/${id}`);
  }
}
