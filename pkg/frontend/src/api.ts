/**
 * Typed client for the corpus service.  Carries the session token,
 * maps error bodies to ApiError, and keeps every call cancellable.
 */

export interface LoginResult {
  token: string;
  user_id: string;
  language_id: string;
}

export interface TranscriptSummary {
  doc_id: string;
  audio_filename: string;
  version: number;
}

export interface Transcript extends TranscriptSummary {
  text: string;
  language_id: string;
}

export interface EditRecord {
  record_id: string;
  doc_id: string;
  user_id: string;
  timestamp: number;
  before_text: string;
  after_text: string;
  resulting_version: number;
}

export interface RecognizeResult {
  segments: Array<{ start_sample: number; end_sample: number }>;
  state_sequence: string[];
  phone_sequence: string[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
  ) {
    super(`${status} ${code}`);
  }
}

async function parseError(resp: Response): Promise<never> {
  let code = "unknown";
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") code = body.error;
  } catch {
    // non-JSON error body; keep the generic code
  }
  throw new ApiError(resp.status, code);
}

export class ApiClient {
  private token: string | null = null;

  constructor(private readonly baseUrl: string = "") {}

  get authenticated(): boolean {
    return this.token !== null;
  }

  clearSession(): void {
    this.token = null;
  }

  private headers(): Record<string, string> {
    const h: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) h["Authorization"] = `Bearer ${this.token}`;
    return h;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
      signal,
    });
    if (!resp.ok) return parseError(resp);
    return (await resp.json()) as T;
  }

  async login(userId: string, password: string): Promise<LoginResult> {
    const result = await this.request<LoginResult>("POST", "/api/login", {
      user_id: userId,
      password,
    });
    this.token = result.token;
    return result;
  }

  listTranscripts(signal?: AbortSignal): Promise<TranscriptSummary[]> {
    return this.request("GET", "/api/transcripts", undefined, signal);
  }

  getTranscript(docId: string, signal?: AbortSignal): Promise<Transcript> {
    return this.request("GET", `/api/transcripts/${encodeURIComponent(docId)}`, undefined, signal);
  }

  saveTranscript(
    docId: string,
    text: string,
    baseVersion: number,
    signal?: AbortSignal,
  ): Promise<{ new_version: number }> {
    return this.request(
      "PUT",
      `/api/transcripts/${encodeURIComponent(docId)}`,
      { text, base_version: baseVersion },
      signal,
    );
  }

  normalize(
    text: string,
    kind: "numbers" | "abbrev",
    signal?: AbortSignal,
  ): Promise<{ text: string }> {
    return this.request("POST", "/api/normalize", { text, kind }, signal);
  }

  listEdits(
    filter: { doc?: string; user?: string },
    signal?: AbortSignal,
  ): Promise<EditRecord[]> {
    const params = new URLSearchParams();
    if (filter.doc) params.set("doc", filter.doc);
    if (filter.user) params.set("user", filter.user);
    const query = params.toString();
    return this.request("GET", `/api/edits${query ? "?" + query : ""}`, undefined, signal);
  }

  async recognize(wav: Uint8Array, signal?: AbortSignal): Promise<RecognizeResult> {
    let binary = "";
    for (let i = 0; i < wav.length; i += 0x8000) {
      binary += String.fromCharCode(...wav.subarray(i, i + 0x8000));
    }
    return this.request("POST", "/api/recognize", { wav_base64: btoa(binary) }, signal);
  }

  /** Streaming URL for the audio behind a transcript. */
  audioUrl(filename: string): string {
    return `${this.baseUrl}/audio/${encodeURIComponent(filename)}`;
  }
}
