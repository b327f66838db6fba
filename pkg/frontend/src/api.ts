/**
 * Typed client for the annotation service /v1 endpoints.  The fetch
 * implementation is injectable so the session logic is testable without
 * a browser or a running backend.
 */

import { Forest, Tree, node, token } from "./tree.js";

export const SCHEMA_VERSION = 1;

export interface ApiToken {
  form: string;
  pos: string;
}

export interface ForestTokenJson {
  type: "token";
  form: string;
  pos: string;
  index: number;
  tag: string;
  score: number | null;
}

export interface ForestNodeJson {
  type: "node";
  label: string;
  start: number;
  end: number;
  children: ForestItemJson[];
}

export type ForestItemJson = ForestTokenJson | ForestNodeJson;

export interface ProposeResponse {
  schema_version: number;
  forest: ForestItemJson[];
  spans: Array<[number, number]>;
  repair_count: number;
  unknown_pos_positions: number[];
  infeasible_spans: Array<[number, number]>;
  chunk_scores: Array<{ start: number; end: number; log_prob: number | null }>;
  sentence_log_prob: number | null;
}

export interface ModelInfo {
  schema_version: number;
  dims: string;
  depth: number;
  order: number;
  tagset_size: number;
  pos_alphabet_size: number;
  lambda: [number, number, number];
  training_sentences: number;
  training_tokens: number;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function checked(response: Response): Promise<unknown> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* keep statusText */
    }
    throw new ServiceError(response.status, detail);
  }
  return response.json();
}

export class AnnotationClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args)
  ) {}

  async propose(
    tokens: ApiToken[],
    spans: Array<[number, number]>
  ): Promise<ProposeResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/v1/propose`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ schema_version: SCHEMA_VERSION, tokens, spans }),
    });
    return (await checked(response)) as ProposeResponse;
  }

  async modelInfo(): Promise<ModelInfo> {
    const response = await this.fetchImpl(`${this.baseUrl}/v1/model`);
    return (await checked(response)) as ModelInfo;
  }

  async health(): Promise<{ status: string; model_loaded: boolean }> {
    const response = await this.fetchImpl(`${this.baseUrl}/v1/health`);
    return (await checked(response)) as { status: string; model_loaded: boolean };
  }
}

/** Convert the service's forest JSON into the local tree model. */
export function forestFromResponse(items: ForestItemJson[]): Forest {
  const convert = (item: ForestItemJson): Tree =>
    item.type === "token"
      ? token(item.form, item.pos)
      : node(item.label, item.children.map(convert));
  return items.map(convert);
}
