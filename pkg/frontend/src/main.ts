/**
 * Page wiring: renders the login, transcript list, editor, and
 * recorder screens from the state modules and routes DOM events back
 * into them.  All business rules live in the imported modules.
 */

import { ApiClient, ApiError, TranscriptSummary } from "./api.js";
import { EditorState } from "./editor.js";
import { RecorderState, TARGET_RATE } from "./recorder.js";

const api = new ApiClient("");
const app = document.getElementById("app") as HTMLElement;

let editor: EditorState | null = null;
let pendingBuffer: { docId: string; text: string } | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  node.append(...children);
  return node;
}

function swap(...children: Array<Node | string>): void {
  app.replaceChildren(...children);
}

function handleAuthLoss(): void {
  // session expiry never discards typed text: stash it for after login
  if (editor && editor.dirty) {
    pendingBuffer = { docId: editor.docId, text: editor.text };
  }
  api.clearSession();
  renderLogin("Session expired. Log in again; your edit is preserved.");
}

function guarded<T>(promise: Promise<T>): Promise<T> {
  return promise.catch((err) => {
    if (err instanceof ApiError && err.status === 401) {
      handleAuthLoss();
    }
    throw err;
  });
}

// -- login --------------------------------------------------------------

function renderLogin(notice = ""): void {
  const user = el("input", { placeholder: "user id", autocomplete: "username" });
  const pass = el("input", { type: "password", placeholder: "password" });
  const banner = el("p", { class: "error" }, notice);
  const button = el("button", {}, "Log in");
  button.addEventListener("click", async () => {
    banner.textContent = "";
    try {
      await api.login(user.value, pass.value);
      await renderList();
    } catch (err) {
      banner.textContent =
        err instanceof ApiError && err.status === 401
          ? "Wrong user id or password."
          : "Could not reach the server.";
    }
  });
  swap(el("h1", {}, "Transcript workbench"), banner, el("div", { class: "form" }, user, pass, button));
}

// -- transcript list ------------------------------------------------------

async function renderList(): Promise<void> {
  const docs = await guarded(api.listTranscripts());
  const rows = docs.map((doc: TranscriptSummary) => {
    const open = el("button", {}, "Edit");
    open.addEventListener("click", () => openEditor(doc.doc_id));
    return el(
      "li",
      {},
      el("span", { class: "doc-id" }, doc.doc_id),
      el("span", { class: "version" }, `v${doc.version}`),
      open,
    );
  });
  const record = el("button", {}, "Record speech");
  record.addEventListener("click", renderRecorder);
  swap(el("h1", {}, "Transcripts"), el("ul", { class: "docs" }, ...rows), record);
}

// -- editor ---------------------------------------------------------------

async function openEditor(docId: string): Promise<void> {
  const doc = await guarded(api.getTranscript(docId));
  editor = new EditorState(api, doc);
  if (pendingBuffer && pendingBuffer.docId === docId) {
    editor.edit(pendingBuffer.text);
    pendingBuffer = null;
  }
  renderEditor();
}

function renderEditor(): void {
  if (!editor) return;
  const state = editor;

  const audio = el("audio", { controls: "", src: api.audioUrl(state.audioFilename) });
  const area = el("textarea", { rows: "10", lang: "hi" });
  area.value = state.text;
  area.addEventListener("input", () => {
    state.edit(area.value);
    refresh();
  });

  const save = el("button", {}, "Save");
  const numbers = el("button", {}, "Numbers to words");
  const abbrev = el("button", {}, "Expand abbreviation");
  const status = el("p", { class: "status" });
  const conflictPane = el("div", { class: "conflict" });

  function refresh(): void {
    save.toggleAttribute("disabled", !state.canSave);
    const empty = area.selectionStart === area.selectionEnd;
    numbers.toggleAttribute("disabled", empty);
    abbrev.toggleAttribute("disabled", empty);
    status.textContent = state.lastError
      ? state.lastError
      : `version ${state.baseVersion}${state.dirty ? " (unsaved changes)" : ""}`;
    conflictPane.replaceChildren();
    if (state.conflict) {
      const keepLocal = el("button", {}, "Keep my text");
      keepLocal.addEventListener("click", async () => {
        await guarded(state.resolveKeepLocal());
        area.value = state.text;
        refresh();
      });
      const takeServer = el("button", {}, "Take server text");
      takeServer.addEventListener("click", () => {
        state.resolveTakeServer();
        area.value = state.text;
        refresh();
      });
      conflictPane.append(
        el("p", {}, `Someone else saved version ${state.conflict.serverVersion}.`),
        el("pre", { class: "server-text" }, state.conflict.serverText),
        keepLocal,
        takeServer,
      );
    }
  }

  save.addEventListener("click", async () => {
    await guarded(state.save());
    refresh();
  });

  const normalizeSelection = async (kind: "numbers" | "abbrev") => {
    const start = area.selectionStart;
    const end = area.selectionEnd;
    if (start === end) return;
    try {
      const result = await guarded(api.normalize(area.value.slice(start, end), kind));
      state.replaceRange(start, end, result.text);
      area.value = state.text;
      refresh();
    } catch {
      // buffer stays untouched on any server error
    }
  };
  numbers.addEventListener("click", () => normalizeSelection("numbers"));
  abbrev.addEventListener("click", () => normalizeSelection("abbrev"));
  area.addEventListener("select", refresh);
  area.addEventListener("keyup", refresh);
  area.addEventListener("mouseup", refresh);

  const back = el("button", {}, "Back");
  back.addEventListener("click", () => {
    editor = null;
    void renderList();
  });

  swap(
    el("h1", {}, state.docId),
    audio,
    area,
    el("div", { class: "toolbar" }, save, numbers, abbrev, back),
    status,
    conflictPane,
  );
  refresh();
}

// -- recorder ---------------------------------------------------------------

function renderRecorder(): void {
  const indicator = el("span", { class: "indicator silence" }, "silence");
  const result = el("pre", { class: "recognition" });
  const start = el("button", {}, "Start recording");
  const stop = el("button", { disabled: "" }, "Stop and recognize");
  const retry = el("button", { disabled: "" }, "Retry upload");
  const message = el("p", { class: "status" });

  let recorder: RecorderState | null = null;
  let context: AudioContext | null = null;
  let lastWav: Uint8Array | null = null;

  async function upload(wav: Uint8Array): Promise<void> {
    message.textContent = "Recognizing...";
    retry.toggleAttribute("disabled", true);
    try {
      const out = await guarded(api.recognize(wav));
      lastWav = null;
      if (out.phone_sequence.length === 0) {
        message.textContent = "No speech detected.";
        result.textContent = "";
      } else {
        message.textContent = "";
        result.textContent =
          `phones: ${out.phone_sequence.join(" ")}\n` +
          `segments: ${out.segments.map((s) => `[${s.start_sample}, ${s.end_sample})`).join(" ")}`;
      }
    } catch {
      lastWav = wav;
      message.textContent = "Upload failed.";
      retry.toggleAttribute("disabled", false);
    }
  }

  start.addEventListener("click", async () => {
    let stream: MediaStream;
    try {
      stream = await navigator.mediaDevices.getUserMedia({ audio: true });
    } catch {
      message.textContent =
        "Microphone access was denied. Allow the microphone for this page and try again.";
      return;
    }
    context = new AudioContext();
    const captureRate = Math.max(TARGET_RATE, Math.round(context.sampleRate));
    recorder = new RecorderState(captureRate);
    const source = context.createMediaStreamSource(stream);
    const tap = context.createScriptProcessor(4096, 1, 1);
    tap.onaudioprocess = (event) => {
      if (!recorder) return;
      const speaking = recorder.push(event.inputBuffer.getChannelData(0));
      indicator.textContent = speaking ? "speech" : "silence";
      indicator.className = `indicator ${speaking ? "speech" : "silence"}`;
    };
    source.connect(tap);
    tap.connect(context.destination);
    start.toggleAttribute("disabled", true);
    stop.toggleAttribute("disabled", false);
    message.textContent = `Recording at ${captureRate} Hz...`;
  });

  stop.addEventListener("click", async () => {
    stop.toggleAttribute("disabled", true);
    start.toggleAttribute("disabled", false);
    await context?.close();
    context = null;
    if (!recorder) return;
    const wav = recorder.buildWav();
    recorder = null;
    await upload(wav);
  });

  retry.addEventListener("click", () => {
    if (lastWav) void upload(lastWav);
  });

  const back = el("button", {}, "Back");
  back.addEventListener("click", () => void renderList());

  swap(
    el("h1", {}, "Record and recognize"),
    el("div", { class: "toolbar" }, start, stop, retry, back, indicator),
    message,
    result,
  );
}

renderLogin();
