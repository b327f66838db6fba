/**
 * The line-oriented bracketed corpus format.
 *
 * One sentence per line; a chunk is `(LABEL child child ...)`, a token is
 * `form/POS` (split on the last slash), bare tokens are legal at top
 * level.  `#pos:` / `#cat:` headers declare alphabets, `#` opens a
 * comment.  This mirrors the backend's reader/writer so exported files
 * round-trip through either side.
 */

import { Forest, Tree, node, token } from "./tree.js";

export class FormatError extends Error {}

export interface Corpus {
  sentences: Forest[];
  posAlphabet: Set<string>;
  catAlphabet: Set<string>;
}

function lex(line: string): string[] {
  return line.replace(/\(/g, " ( ").replace(/\)/g, " ) ").split(/\s+/).filter(Boolean);
}

function parseToken(atom: string, lineno: number): Tree {
  const cut = atom.lastIndexOf("/");
  if (cut <= 0 || cut === atom.length - 1) {
    throw new FormatError(`line ${lineno}: token ${atom} has no POS`);
  }
  return token(atom.slice(0, cut), atom.slice(cut + 1));
}

export function parseSentence(line: string, lineno = 1): Forest {
  const atoms = lex(line);
  const stack: Tree[][] = [[]];
  const labels: string[] = [];
  let i = 0;
  while (i < atoms.length) {
    const atom = atoms[i];
    if (atom === "(") {
      const label = atoms[i + 1];
      if (label === undefined || label === "(" || label === ")") {
        throw new FormatError(`line ${lineno}: '(' without a label`);
      }
      labels.push(label);
      stack.push([]);
      i += 2;
    } else if (atom === ")") {
      if (stack.length === 1) {
        throw new FormatError(`line ${lineno}: unbalanced ')'`);
      }
      const children = stack.pop()!;
      const label = labels.pop()!;
      if (children.length === 0) {
        throw new FormatError(`line ${lineno}: empty node (${label})`);
      }
      stack[stack.length - 1].push(node(label, children));
      i += 1;
    } else {
      stack[stack.length - 1].push(parseToken(atom, lineno));
      i += 1;
    }
  }
  if (stack.length !== 1) {
    throw new FormatError(`line ${lineno}: unclosed '('`);
  }
  return stack[0];
}

export function parseBracketed(text: string): Corpus {
  const sentences: Forest[] = [];
  const declaredPos = new Set<string>();
  const declaredCat = new Set<string>();
  let lineno = 0;
  for (const raw of text.split("\n")) {
    lineno += 1;
    const line = raw.trim();
    if (!line) continue;
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      if (body.startsWith("pos:")) {
        for (const p of body.slice(4).trim().split(/\s+/).filter(Boolean)) declaredPos.add(p);
      } else if (body.startsWith("cat:")) {
        for (const c of body.slice(4).trim().split(/\s+/).filter(Boolean)) declaredCat.add(c);
      }
      continue;
    }
    sentences.push(parseSentence(line, lineno));
  }
  const posAlphabet = new Set(declaredPos);
  const catAlphabet = new Set(declaredCat);
  if (posAlphabet.size === 0 || catAlphabet.size === 0) {
    for (const forest of sentences) {
      for (const item of forest) collectAlphabets(item, posAlphabet, catAlphabet);
    }
  }
  return { sentences, posAlphabet, catAlphabet };
}

function collectAlphabets(item: Tree, pos: Set<string>, cat: Set<string>): void {
  if (item.kind === "token") {
    pos.add(item.pos);
  } else {
    cat.add(item.label);
    for (const child of item.children) collectAlphabets(child, pos, cat);
  }
}

function serializeItem(item: Tree): string {
  if (item.kind === "token") return `${item.form}/${item.pos}`;
  return `(${item.label} ${item.children.map(serializeItem).join(" ")})`;
}

export function serializeSentence(forest: Forest): string {
  return forest.map(serializeItem).join(" ");
}

export function serializeCorpus(sentences: Forest[], header = true): string {
  const lines: string[] = [];
  if (header) {
    const pos = new Set<string>();
    const cat = new Set<string>();
    for (const forest of sentences) {
      for (const item of forest) collectAlphabets(item, pos, cat);
    }
    lines.push("#pos: " + [...pos].sort().join(" "));
    lines.push("#cat: " + [...cat].sort().join(" "));
  }
  for (const forest of sentences) lines.push(serializeSentence(forest));
  return lines.join("\n") + "\n";
}

/** Parse a POS-tagged line: whitespace-separated form/POS atoms. */
export function parsePosLine(line: string, lineno = 1): Array<{ form: string; pos: string }> {
  const out: Array<{ form: string; pos: string }> = [];
  for (const atom of line.trim().split(/\s+/).filter(Boolean)) {
    const leaf = parseToken(atom, lineno) as { form: string; pos: string };
    out.push({ form: leaf.form, pos: leaf.pos });
  }
  return out;
}
