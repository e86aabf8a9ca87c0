/**
 * Typed client for the kidspeech scoring service.
 *
 * The console performs no scoring math of its own: every number and mark
 * rendered in the UI comes out of these payloads unmodified.
 */

export interface RanMark {
  kind: 'correct' | 'substituted' | 'missed';
  expected: string;
  said: string | null;
}

export interface RanPayload {
  marks: RanMark[];
  extras: string[];
  accuracy: number;
  total_time_s: number;
  items_per_s: number;
}

export interface AlignmentStep {
  kind: 'match' | 'sub' | 'del' | 'ins';
  target: string | null;
  response: string | null;
}

export interface PseudowordPayload {
  target_word: string;
  response_text: string;
  target_phonemes: string[];
  response_phonemes: string[];
  ops: { insertions: number; deletions: number; substitutions: number; matches: number };
  alignment: AlignmentStep[];
  exact_match: boolean;
  per: number;
}

export interface ResultRecord {
  id: string;
  recording_id: string;
  task: 'ran' | 'pseudoword';
  payload: RanPayload | PseudowordPayload;
  created_at: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`service responded ${status}: ${detail}`);
  }
}

async function fail(response: Response): Promise<never> {
  let detail = '';
  try {
    const body = await response.json();
    detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body);
  } catch {
    detail = response.statusText;
  }
  throw new ApiError(response.status, detail);
}

export class ServiceClient {
  // baseUrl '' targets the same origin that serves the console bundle
  constructor(readonly baseUrl = '') {}

  private async getJson(path: string): Promise<any> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) await fail(response);
    return response.json();
  }

  private async postJson(path: string, body: unknown): Promise<any> {
    const response = await fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!response.ok) await fail(response);
    return response.json();
  }

  async health(): Promise<void> {
    await this.getJson('/healthz');
  }

  async createSession(childAlias: string): Promise<string> {
    const body = await this.postJson('/sessions', { child_alias: childAlias });
    return body.session_id;
  }

  async uploadRecording(sessionId: string, task: 'ran' | 'pseudoword',
                        wav: Uint8Array<ArrayBuffer>): Promise<string> {
    const path = `/sessions/${sessionId}/recordings?task=${task}`;
    const response = await fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': 'audio/wav' },
      body: wav,
    });
    if (!response.ok) await fail(response);
    const body = await response.json();
    return body.recording_id;
  }

  async scoreRan(recordingId: string, expected: string[]): Promise<RanPayload> {
    return this.postJson('/score/ran', {
      recording_id: recordingId,
      expected_sequence: expected,
    });
  }

  async scorePseudoword(recordingId: string, target: string): Promise<PseudowordPayload> {
    return this.postJson('/score/pseudoword', {
      recording_id: recordingId,
      target_word: target,
    });
  }

  async sessionResults(sessionId: string): Promise<ResultRecord[]> {
    const body = await this.getJson(`/sessions/${sessionId}/results`);
    return body.results;
  }
}
