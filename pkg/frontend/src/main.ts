/**
 * Entry point: wires the session, the service client and the SVG
 * renderer to the static page.  Workflow: load a file, select a token
 * range (click start, shift-click end), propose, correct by clicking
 * node labels, accept, export.
 */

import { AnnotationClient } from "./api.js";
import { Correction, CorrectionError } from "./corrections.js";
import { renderSentence } from "./render.js";
import { AnnotationSession, SessionError } from "./session.js";
import { Path, itemAt, tokensOf } from "./tree.js";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

let session = new AnnotationSession(client());
let current = 0;
let selStart: number | null = null;
let selEnd: number | null = null;

function client(): AnnotationClient {
  const url = (document.getElementById("service-url") as HTMLInputElement | null)
    ?.value ?? "http://127.0.0.1:8571";
  return new AnnotationClient(url.replace(/\/+$/, ""));
}

function status(message: string, isError = false): void {
  const box = el<HTMLElement>("status");
  box.textContent = message;
  box.className = isError ? "status error" : "status";
}

function refresh(): void {
  const holder = el<HTMLElement>("sentence");
  const info = el<HTMLElement>("sentence-info");
  if (session.sentences.length === 0) {
    holder.textContent = "";
    info.textContent = "no sentences loaded";
    return;
  }
  current = Math.min(current, session.sentences.length - 1);
  const entry = session.entry(current);
  info.textContent = `sentence ${current + 1}/${session.sentences.length} [${entry.state}]`
    + (entry.repairCount ? `  repairs: ${entry.repairCount}` : "")
    + (entry.corrections.length ? `  corrections: ${entry.corrections.length}` : "");
  const selection: [number, number] | null =
    selStart !== null && selEnd !== null ? [selStart, selEnd + 1] : null;
  renderSentence(holder, entry.forest, entry.tokens, selection, {
    onTokenClick(index, shiftKey) {
      if (shiftKey && selStart !== null) {
        selEnd = Math.max(index, selStart);
        selStart = Math.min(index, selStart);
      } else {
        selStart = index;
        selEnd = index;
      }
      refresh();
    },
    onNodeClick(path) {
      nodeMenu(path);
    },
  });
}

function nodeMenu(path: Path): void {
  const entry = session.entry(current);
  const target = itemAt(entry.forest, path);
  const name = target.kind === "node" ? target.label : target.form;
  const choice = window.prompt(
    `${name}: action? (relabel <L> | reattach | split)`,
    "relabel "
  );
  if (!choice) return;
  try {
    let correction: Correction;
    if (choice.startsWith("relabel")) {
      const label = choice.slice(7).trim() || window.prompt("new label") || "";
      correction = { op: "relabel", path, label };
    } else if (choice.trim() === "reattach") {
      correction = { op: "reattach", path };
    } else if (choice.trim() === "split") {
      correction = { op: "split", path };
    } else {
      status(`unknown action ${choice}`, true);
      return;
    }
    session.correct(current, correction);
    status("correction applied");
  } catch (err) {
    if (err instanceof CorrectionError || err instanceof SessionError) {
      status(err.message, true);
    } else {
      throw err;
    }
  }
  refresh();
}

async function proposeSelection(): Promise<void> {
  if (selStart === null || selEnd === null) {
    status("select a token range first (click, then shift-click)", true);
    return;
  }
  try {
    await session.submitSpan(current, selStart, selEnd + 1);
    selStart = selEnd = null;
    status("proposal received");
  } catch (err) {
    status(err instanceof Error ? err.message : String(err), true);
  }
  refresh();
}

function mergeSelection(): void {
  if (selStart === null || selEnd === null) {
    status("select the sibling range to merge first", true);
    return;
  }
  const label = window.prompt("label for the new node") || "";
  try {
    // merge top-level items covering the selection exactly
    const entry = session.entry(current);
    let pos = 0;
    let from = -1;
    let to = -1;
    entry.forest.forEach((item, i) => {
      const width = tokensOf(item).length;
      if (pos === selStart) from = i;
      if (pos + width - 1 === selEnd) to = i;
      pos += width;
    });
    if (from < 0 || to < 0) {
      status("selection must align with top-level item boundaries", true);
      return;
    }
    session.correct(current, { op: "merge", parent: [], from, to, label });
    selStart = selEnd = null;
    status("merged");
  } catch (err) {
    status(err instanceof Error ? err.message : String(err), true);
  }
  refresh();
}

function download(name: string, text: string): void {
  const blob = new Blob([text], { type: "text/plain;charset=utf-8" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = name;
  a.click();
  URL.revokeObjectURL(a.href);
}

function wire(): void {
  el<HTMLInputElement>("file-input").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    const text = await file.text();
    session = new AnnotationSession(client());
    try {
      if (text.includes("(")) {
        session.loadBracketed(text);
      } else {
        session.loadPosTagged(text);
      }
      current = 0;
      status(`loaded ${session.sentences.length} sentences from ${file.name}`);
    } catch (err) {
      status(err instanceof Error ? err.message : String(err), true);
    }
    refresh();
  });
  el<HTMLElement>("btn-propose").addEventListener("click", () => void proposeSelection());
  el<HTMLElement>("btn-merge").addEventListener("click", mergeSelection);
  el<HTMLElement>("btn-accept").addEventListener("click", () => {
    try {
      session.accept(current);
      status("sentence accepted");
    } catch (err) {
      status(err instanceof Error ? err.message : String(err), true);
    }
    refresh();
  });
  el<HTMLElement>("btn-export").addEventListener("click", () => {
    try {
      download("annotations.br", session.exportAccepted());
      status(`exported ${session.acceptedCount()} sentences`);
    } catch (err) {
      status(err instanceof Error ? err.message : String(err), true);
    }
  });
  el<HTMLElement>("btn-prev").addEventListener("click", () => {
    current = Math.max(0, current - 1);
    selStart = selEnd = null;
    refresh();
  });
  el<HTMLElement>("btn-next").addEventListener("click", () => {
    current = Math.min(session.sentences.length - 1, current + 1);
    selStart = selEnd = null;
    refresh();
  });
  el<HTMLElement>("btn-health").addEventListener("click", async () => {
    try {
      const health = await client().health();
      status(`service ok, model loaded: ${health.model_loaded}`);
    } catch (err) {
      status(err instanceof Error ? err.message : String(err), true);
    }
  });
  refresh();
}

document.addEventListener("DOMContentLoaded", wire);
