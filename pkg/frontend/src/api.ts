/** Thin typed client over the mealcarbon HTTP API.
 *
 * The fetch implementation is injectable so tests can run against
 * recorded payloads without a server.
 */

import type {
  AssessmentResponse, CandidatesResponse, ChatResponse, Meta, SessionCreated,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, readonly detail: string) {
    super(`API error ${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl = '',
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail = typeof body?.detail === 'string'
        ? body.detail : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  getMeta(): Promise<Meta> {
    return this.request<Meta>('/api/meta');
  }

  createSession(text: string, targetCountry: string): Promise<SessionCreated> {
    return this.post<SessionCreated>('/api/sessions', {
      text, target_country: targetCountry,
    });
  }

  getCandidates(sessionId: string): Promise<CandidatesResponse> {
    return this.request<CandidatesResponse>(
      `/api/sessions/${encodeURIComponent(sessionId)}/candidates`);
  }

  postSelection(
    sessionId: string, selections: Record<string, string[]>,
  ): Promise<AssessmentResponse> {
    return this.post<AssessmentResponse>(
      `/api/sessions/${encodeURIComponent(sessionId)}/selection`,
      { selections });
  }

  chat(sessionId: string, message: string): Promise<ChatResponse> {
    return this.post<ChatResponse>(
      `/api/sessions/${encodeURIComponent(sessionId)}/chat`, { message });
  }
}
