/**
 * Constituent-forest model shared by the whole annotator.
 *
 * A sentence is a forest of top-level items: chunk nodes or bare tokens.
 * Tokens may sit at most MAX_DEPTH node levels below their top-level
 * chunk root; every editing operation re-checks that bound before it is
 * allowed to land.
 */

export interface TokenLeaf {
  kind: "token";
  form: string;
  pos: string;
}

export interface ChunkNode {
  kind: "node";
  label: string;
  children: Tree[];
}

export type Tree = TokenLeaf | ChunkNode;
export type Forest = Tree[];

export const MAX_DEPTH = 3;

export class InvariantError extends Error {}

export function token(form: string, pos: string): TokenLeaf {
  return { kind: "token", form, pos };
}

export function node(label: string, children: Tree[]): ChunkNode {
  if (children.length === 0) {
    throw new InvariantError(`node ${label} with no children`);
  }
  return { kind: "node", label, children };
}

export function tokensOf(item: Tree): TokenLeaf[] {
  if (item.kind === "token") return [item];
  return item.children.flatMap(tokensOf);
}

export function forestTokens(forest: Forest): TokenLeaf[] {
  return forest.flatMap(tokensOf);
}

/** Deepest token position, counted in node levels below the given root
 * (a token directly under the root is at depth 0). */
export function maxTokenDepth(item: Tree): number {
  if (item.kind === "token") return 0;
  let deepest = 0;
  for (const child of item.children) {
    if (child.kind === "node") {
      deepest = Math.max(deepest, 1 + maxTokenDepth(child));
    }
  }
  return deepest;
}

export function validateForest(forest: Forest): void {
  for (const item of forest) {
    if (item.kind === "node" && maxTokenDepth(item) > MAX_DEPTH) {
      throw new InvariantError(
        `chunk ${item.label} exceeds depth ${MAX_DEPTH}`
      );
    }
  }
}

export function cloneTree(item: Tree): Tree {
  if (item.kind === "token") return { ...item };
  return { kind: "node", label: item.label, children: item.children.map(cloneTree) };
}

export function cloneForest(forest: Forest): Forest {
  return forest.map(cloneTree);
}

/** [start, end) spans of the top-level chunks, bare tokens skipped. */
export function topLevelSpans(forest: Forest): Array<[number, number]> {
  const spans: Array<[number, number]> = [];
  let pos = 0;
  for (const item of forest) {
    const width = tokensOf(item).length;
    if (item.kind === "node") spans.push([pos, pos + width]);
    pos += width;
  }
  return spans;
}

/** A path addresses an item: [top-level index, child index, ...]. */
export type Path = number[];

export function itemAt(forest: Forest, path: Path): Tree {
  if (path.length === 0) throw new InvariantError("empty path");
  let item: Tree = forest[path[0]];
  if (item === undefined) throw new InvariantError(`bad path ${path}`);
  for (const index of path.slice(1)) {
    if (item.kind !== "node" || item.children[index] === undefined) {
      throw new InvariantError(`bad path ${path}`);
    }
    item = item.children[index];
  }
  return item;
}

export function treesEqual(a: Tree, b: Tree): boolean {
  if (a.kind !== b.kind) return false;
  if (a.kind === "token" && b.kind === "token") {
    return a.form === b.form && a.pos === b.pos;
  }
  if (a.kind === "node" && b.kind === "node") {
    return (
      a.label === b.label &&
      a.children.length === b.children.length &&
      a.children.every((c, i) => treesEqual(c, b.children[i]))
    );
  }
  return false;
}

export function forestsEqual(a: Forest, b: Forest): boolean {
  return a.length === b.length && a.every((t, i) => treesEqual(t, b[i]));
}
