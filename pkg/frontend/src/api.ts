// Typed client for the teach-then-test session service.

export interface SessionInfo {
  session_id: string;
  n_teach: number;
  n_test: number;
  labels: { '1': string; '-1': string };
}

export interface Item {
  item_id: string;
  phase: 'teach' | 'test';
  index: number;
  total: number;
  asset?: string;
  features?: number[];
}

export interface Done {
  done: true;
  report_url: string;
}

export interface Feedback {
  feedback: { correct_label: number } | null;
}

export interface ReportRow {
  item_id: string;
  phase: string;
  given_label: number;
  correct: boolean;
}

export interface Report {
  group: string;
  test_error: number;
  per_item: ReportRow[];
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { 'Content-Type': 'application/json' },
    ...init,
  });
  if (!response.ok) {
    const body = await response.text();
    throw new ApiError(response.status, `${response.status}: ${body}`);
  }
  return response.json() as Promise<T>;
}

export class SessionApi {
  constructor(private baseUrl: string) {}

  createSession(group: string): Promise<SessionInfo> {
    return request<SessionInfo>(`${this.baseUrl}/sessions`, {
      method: 'POST',
      body: JSON.stringify({ group }),
    });
  }

  nextItem(sessionId: string): Promise<Item | Done> {
    return request<Item | Done>(`${this.baseUrl}/sessions/${sessionId}/next`);
  }

  submitAnswer(sessionId: string, itemId: string, label: 1 | -1): Promise<Feedback> {
    return request<Feedback>(`${this.baseUrl}/sessions/${sessionId}/answer`, {
      method: 'POST',
      body: JSON.stringify({ item_id: itemId, label }),
    });
  }

  report(sessionId: string): Promise<Report> {
    return request<Report>(`${this.baseUrl}/sessions/${sessionId}/report`);
  }
}

export function isDone(value: Item | Done): value is Done {
  return (value as Done).done === true;
}
