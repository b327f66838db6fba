/**
 * Annotation session state: the loaded sentences, their lifecycle
 * (pending -> proposed -> accepted), the spans sent to the service, and
 * the correction history.  Only accepted sentences are exported, and the
 * exporter refuses forests that violate the depth bound, so an exported
 * file always re-parses.
 */

import { AnnotationClient, ApiToken, forestFromResponse } from "./api.js";
import {
  parseBracketed,
  parsePosLine,
  serializeCorpus,
  serializeSentence,
} from "./bracketed.js";
import { Correction, applyCorrection } from "./corrections.js";
import {
  Forest,
  cloneForest,
  forestTokens,
  topLevelSpans,
  validateForest,
} from "./tree.js";

export type SentenceState = "pending" | "proposed" | "accepted";

export interface SentenceEntry {
  tokens: ApiToken[];
  forest: Forest;
  state: SentenceState;
  spans: Array<[number, number]>;
  corrections: string[];
  repairCount: number;
  infeasibleSpans: Array<[number, number]>;
}

export class SessionError extends Error {}

export class AnnotationSession {
  readonly sentences: SentenceEntry[] = [];

  constructor(private client: AnnotationClient) {}

  /** Load sentences with structure (bracketed) for review. */
  loadBracketed(text: string): void {
    const corpus = parseBracketed(text);
    for (const forest of corpus.sentences) {
      validateForest(forest);
      this.sentences.push({
        tokens: forestTokens(forest).map((t) => ({ form: t.form, pos: t.pos })),
        forest,
        state: "proposed",
        spans: topLevelSpans(forest),
        corrections: [],
        repairCount: 0,
        infeasibleSpans: [],
      });
    }
  }

  /** Load raw POS-tagged sentences, one per line, form/POS tokens. */
  loadPosTagged(text: string): void {
    let lineno = 0;
    for (const raw of text.split("\n")) {
      lineno += 1;
      const line = raw.trim();
      if (!line || line.startsWith("#")) continue;
      const tokens = parsePosLine(line, lineno);
      this.sentences.push({
        tokens,
        forest: tokens.map((t) => ({ kind: "token", ...t })),
        state: "pending",
        spans: [],
        corrections: [],
        repairCount: 0,
        infeasibleSpans: [],
      });
    }
  }

  entry(index: number): SentenceEntry {
    const entry = this.sentences[index];
    if (entry === undefined) throw new SessionError(`no sentence ${index}`);
    return entry;
  }

  /**
   * Add a chunk span and ask the service for the analysis of every span
   * marked so far.  Zero-length selections are a no-op; overlapping
   * selections are rejected before any request goes out.
   */
  async submitSpan(index: number, start: number, end: number): Promise<SentenceEntry> {
    const entry = this.entry(index);
    if (end <= start) {
      throw new SessionError("empty selection: select at least one token");
    }
    if (start < 0 || end > entry.tokens.length) {
      throw new SessionError(`span [${start}, ${end}) out of range`);
    }
    for (const [s, e] of entry.spans) {
      if (start < e && s < end) {
        throw new SessionError(
          `selection [${start}, ${end}) overlaps existing span [${s}, ${e})`
        );
      }
    }
    const spans = [...entry.spans, [start, end] as [number, number]].sort(
      (a, b) => a[0] - b[0]
    );
    const response = await this.client.propose(entry.tokens, spans);
    entry.spans = spans;
    entry.forest = forestFromResponse(response.forest);
    entry.state = "proposed";
    entry.repairCount = response.repair_count;
    entry.infeasibleSpans = response.infeasible_spans;
    return entry;
  }

  /** Re-propose with the current spans (after span removal, say). */
  async repropose(index: number): Promise<SentenceEntry> {
    const entry = this.entry(index);
    const response = await this.client.propose(entry.tokens, entry.spans);
    entry.forest = forestFromResponse(response.forest);
    entry.state = "proposed";
    entry.repairCount = response.repair_count;
    entry.infeasibleSpans = response.infeasible_spans;
    return entry;
  }

  /** Apply a manual correction; depth-violating edits are refused. */
  correct(index: number, correction: Correction): SentenceEntry {
    const entry = this.entry(index);
    if (entry.state === "pending") {
      throw new SessionError("nothing proposed for this sentence yet");
    }
    entry.forest = applyCorrection(entry.forest, correction);
    entry.spans = topLevelSpans(entry.forest);
    entry.corrections.push(JSON.stringify(correction));
    entry.state = "proposed";
    return entry;
  }

  accept(index: number): SentenceEntry {
    const entry = this.entry(index);
    validateForest(entry.forest);
    entry.state = "accepted";
    return entry;
  }

  acceptedCount(): number {
    return this.sentences.filter((s) => s.state === "accepted").length;
  }

  /** Bracketed text of all accepted sentences, parseable by the backend. */
  exportAccepted(header = true): string {
    const accepted = this.sentences.filter((s) => s.state === "accepted");
    if (accepted.length === 0) {
      throw new SessionError("no accepted sentences to export");
    }
    for (const entry of accepted) validateForest(entry.forest);
    return serializeCorpus(accepted.map((s) => cloneForest(s.forest)), header);
  }

  /** One-sentence preview used by the UI. */
  preview(index: number): string {
    return serializeSentence(this.entry(index).forest);
  }
}
