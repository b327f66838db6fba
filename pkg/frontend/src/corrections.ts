/**
 * Manual corrections to a proposed forest: relabel, reattach, split,
 * merge.  Every operation returns a new forest, leaves token order
 * untouched and refuses edits that would break the depth bound or span
 * contiguity; the caller surfaces the error message to the annotator.
 */

import {
  ChunkNode,
  Forest,
  MAX_DEPTH,
  Path,
  Tree,
  cloneForest,
  itemAt,
  maxTokenDepth,
  node,
  tokensOf,
} from "./tree.js";

export type Correction =
  | { op: "relabel"; path: Path; label: string }
  | { op: "reattach"; path: Path }
  | { op: "split"; path: Path }
  | { op: "merge"; parent: Path; from: number; to: number; label: string };

export class CorrectionError extends Error {}

function parentOf(forest: Forest, path: Path): { children: Tree[]; index: number } {
  if (path.length === 1) {
    return { children: forest as Tree[], index: path[0] };
  }
  const parent = itemAt(forest, path.slice(0, -1));
  if (parent.kind !== "node") throw new CorrectionError("path through a token");
  return { children: parent.children, index: path[path.length - 1] };
}

export function applyCorrection(forest: Forest, correction: Correction): Forest {
  const next = cloneForest(forest);
  switch (correction.op) {
    case "relabel":
      relabel(next, correction.path, correction.label);
      break;
    case "reattach":
      reattach(next, correction.path);
      break;
    case "split":
      split(next, correction.path);
      break;
    case "merge":
      merge(next, correction.parent, correction.from, correction.to, correction.label);
      break;
  }
  for (const item of next) {
    if (item.kind === "node" && maxTokenDepth(item) > MAX_DEPTH) {
      throw new CorrectionError(`edit would exceed depth ${MAX_DEPTH}`);
    }
  }
  return next;
}

function relabel(forest: Forest, path: Path, label: string): void {
  const target = itemAt(forest, path);
  if (target.kind !== "node") {
    throw new CorrectionError("only chunk nodes can be relabelled");
  }
  if (!label) throw new CorrectionError("empty label");
  (target as ChunkNode).label = label;
}

/**
 * Move a nested node (or token) to the top level.  Token order must be
 * preserved, so the target's yield has to be a contiguous prefix or
 * suffix of its top-level chunk's yield; it lands directly before or
 * after that chunk, which is exactly where attachment stripping puts
 * detached material.
 */
function reattach(forest: Forest, path: Path): void {
  if (path.length < 2) {
    throw new CorrectionError("item is already at top level");
  }
  const top = forest[path[0]];
  if (top === undefined || top.kind !== "node") {
    throw new CorrectionError("no enclosing chunk");
  }
  const target = itemAt(forest, path);
  const topTokens = tokensOf(top);
  const targetTokens = tokensOf(target);
  const isPrefix = targetTokens[0] === topTokens[0];
  const isSuffix =
    targetTokens[targetTokens.length - 1] === topTokens[topTokens.length - 1];
  if (!isPrefix && !isSuffix) {
    throw new CorrectionError(
      "reattaching this item would break token contiguity"
    );
  }
  if (targetTokens.length === topTokens.length) {
    throw new CorrectionError("cannot detach the whole chunk from itself");
  }
  const { children, index } = parentOf(forest, path);
  children.splice(index, 1);
  pruneEmpty(forest, path.slice(0, -1));
  // the host chunk always survives (detaching all of it is rejected above)
  const topIndex = path[0];
  forest.splice(isSuffix ? topIndex + 1 : topIndex, 0, target);
}

/** Remove now-empty nodes along a path, bottom-up. */
function pruneEmpty(forest: Forest, path: Path): void {
  for (let depth = path.length; depth >= 1; depth -= 1) {
    const prefix = path.slice(0, depth);
    const item = itemAt(forest, prefix);
    if (item.kind === "node" && item.children.length === 0) {
      const { children, index } = parentOf(forest, prefix);
      children.splice(index, 1);
    }
  }
}

/** Dissolve a node: its children take its place in the parent. */
function split(forest: Forest, path: Path): void {
  const target = itemAt(forest, path);
  if (target.kind !== "node") {
    throw new CorrectionError("only chunk nodes can be split");
  }
  const { children, index } = parentOf(forest, path);
  children.splice(index, 1, ...target.children);
}

/** Wrap a contiguous child range of a node (or of the top level) into a
 * fresh node with the given label. */
function merge(forest: Forest, parent: Path, from: number, to: number, label: string): void {
  const children =
    parent.length === 0 ? (forest as Tree[]) : (itemAt(forest, parent) as ChunkNode).children;
  if (parent.length > 0 && itemAt(forest, parent).kind !== "node") {
    throw new CorrectionError("merge parent is a token");
  }
  if (!(0 <= from && from <= to && to < children.length)) {
    throw new CorrectionError(`bad merge range ${from}..${to}`);
  }
  if (!label) throw new CorrectionError("empty label");
  const wrapped = node(label, children.slice(from, to + 1));
  children.splice(from, to - from + 1, wrapped);
}
