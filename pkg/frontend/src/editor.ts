/**
 * Editor state machine for one transcript.  Pure logic, no DOM: the
 * page layer renders from this and calls back into it.
 *
 * Core rules: save is possible only when the buffer is dirty, the
 * base version always mirrors the last version loaded from or
 * acknowledged by the server, a conflict never overwrites the local
 * buffer, and a failed network call keeps the dirty text intact.
 */

import { ApiClient, ApiError, Transcript } from "./api.js";

export type EditorPhase = "idle" | "saving" | "conflict";

export interface ConflictInfo {
  serverText: string;
  serverVersion: number;
}

export class EditorState {
  docId: string;
  audioFilename: string;
  text: string;
  baseVersion: number;
  dirty = false;
  phase: EditorPhase = "idle";
  conflict: ConflictInfo | null = null;
  lastError: string | null = null;

  private savedText: string;
  private inflight: AbortController | null = null;

  constructor(
    private readonly api: ApiClient,
    doc: Transcript,
  ) {
    this.docId = doc.doc_id;
    this.audioFilename = doc.audio_filename;
    this.text = doc.text;
    this.savedText = doc.text;
    this.baseVersion = doc.version;
  }

  get canSave(): boolean {
    return this.dirty && this.phase !== "saving";
  }

  /** Keystrokes land here; dirtiness tracks divergence from the last save. */
  edit(newText: string): void {
    this.text = newText;
    this.dirty = newText !== this.savedText;
  }

  /** Replace [start, end) of the buffer, e.g. with normalized text. */
  replaceRange(start: number, end: number, replacement: string): void {
    this.edit(this.text.slice(0, start) + replacement + this.text.slice(end));
  }

  async save(): Promise<boolean> {
    if (!this.canSave) return false;
    this.phase = "saving";
    this.lastError = null;
    this.inflight?.abort();
    this.inflight = new AbortController();
    const sending = this.text;
    try {
      const result = await this.api.saveTranscript(
        this.docId,
        sending,
        this.baseVersion,
        this.inflight.signal,
      );
      this.baseVersion = result.new_version;
      this.savedText = sending;
      this.dirty = this.text !== sending;
      this.phase = "idle";
      this.conflict = null;
      return true;
    } catch (err) {
      this.phase = "idle";
      if (err instanceof ApiError && err.status === 409) {
        const server = await this.api.getTranscript(this.docId);
        this.conflict = { serverText: server.text, serverVersion: server.version };
        this.phase = "conflict";
      } else {
        this.lastError = err instanceof Error ? err.message : String(err);
      }
      return false;
    } finally {
      this.inflight = null;
    }
  }

  /** Conflict choice: push the local buffer on top of the server version. */
  async resolveKeepLocal(): Promise<boolean> {
    if (this.conflict === null) return false;
    this.baseVersion = this.conflict.serverVersion;
    this.conflict = null;
    this.phase = "idle";
    this.dirty = true;
    return this.save();
  }

  /** Conflict choice: discard the local buffer, adopt the server text. */
  resolveTakeServer(): void {
    if (this.conflict === null) return;
    this.text = this.conflict.serverText;
    this.savedText = this.conflict.serverText;
    this.baseVersion = this.conflict.serverVersion;
    this.dirty = false;
    this.conflict = null;
    this.phase = "idle";
  }
}
