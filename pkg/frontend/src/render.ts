/**
 * SVG rendering: a token row with constituency brackets drawn above it.
 * Nodes are clickable (corrections), tokens are clickable (span
 * selection).  Pure DOM, no framework; state lives in main.ts.
 */

import { Forest, Path, Tree } from "./tree.js";

export interface RenderHandlers {
  onTokenClick(index: number, shift: boolean): void;
  onNodeClick(path: Path): void;
}

const TOKEN_WIDTH = 86;
const LEVEL_STEP = 34;
const BASELINE_PAD = 54;

interface Laid {
  path: Path;
  label: string;
  start: number;
  end: number;
  level: number;
}

function layout(forest: Forest): { nodes: Laid[]; maxLevel: number } {
  const nodes: Laid[] = [];
  let maxLevel = 0;
  let pos = 0;

  const walk = (item: Tree, path: Path): { width: number; level: number } => {
    if (item.kind === "token") {
      pos += 1;
      return { width: 1, level: 0 };
    }
    const start = pos;
    let level = 0;
    item.children.forEach((child, i) => {
      const r = walk(child, [...path, i]);
      level = Math.max(level, r.level);
    });
    const laid = {
      path,
      label: item.label,
      start,
      end: pos,
      level: level + 1,
    };
    nodes.push(laid);
    maxLevel = Math.max(maxLevel, laid.level);
    return { width: pos - start, level: laid.level };
  };

  forest.forEach((item, i) => walk(item, [i]));
  return { nodes, maxLevel };
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  name: K,
  attrs: Record<string, string>
): SVGElementTagNameMap[K] {
  const el = document.createElementNS("http://www.w3.org/2000/svg", name);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  return el;
}

export function renderSentence(
  container: HTMLElement,
  forest: Forest,
  tokens: Array<{ form: string; pos: string }>,
  selection: [number, number] | null,
  handlers: RenderHandlers
): void {
  container.textContent = "";
  const { nodes, maxLevel } = layout(forest);
  const width = Math.max(1, tokens.length) * TOKEN_WIDTH + 20;
  const baseline = (maxLevel + 1) * LEVEL_STEP + 16;
  const height = baseline + BASELINE_PAD;
  const svg = svgEl("svg", {
    width: String(width),
    height: String(height),
    viewBox: `0 0 ${width} ${height}`,
    class: "sentence-svg",
  });

  const xCenter = (i: number) => i * TOKEN_WIDTH + TOKEN_WIDTH / 2 + 10;

  if (selection) {
    const [s, e] = selection;
    svg.appendChild(
      svgEl("rect", {
        x: String(xCenter(s) - TOKEN_WIDTH / 2 + 4),
        y: String(baseline - 14),
        width: String((e - s) * TOKEN_WIDTH - 8),
        height: "44",
        class: "selection",
        rx: "6",
      })
    );
  }

  for (const laid of nodes) {
    const y = baseline - laid.level * LEVEL_STEP;
    const x1 = xCenter(laid.start) - TOKEN_WIDTH / 2 + 8;
    const x2 = xCenter(laid.end - 1) + TOKEN_WIDTH / 2 - 8;
    const bracket = svgEl("path", {
      d: `M ${x1} ${y + 14} L ${x1} ${y} L ${x2} ${y} L ${x2} ${y + 14}`,
      class: "bracket",
      fill: "none",
    });
    svg.appendChild(bracket);
    const label = svgEl("text", {
      x: String((x1 + x2) / 2),
      y: String(y - 5),
      class: "node-label",
      "text-anchor": "middle",
    });
    label.textContent = laid.label;
    label.addEventListener("click", () => handlers.onNodeClick(laid.path));
    svg.appendChild(label);
  }

  tokens.forEach((tok, i) => {
    const group = svgEl("g", { class: "token-group" });
    const form = svgEl("text", {
      x: String(xCenter(i)),
      y: String(baseline + 6),
      class: "token-form",
      "text-anchor": "middle",
    });
    form.textContent = tok.form;
    const pos = svgEl("text", {
      x: String(xCenter(i)),
      y: String(baseline + 26),
      class: "token-pos",
      "text-anchor": "middle",
    });
    pos.textContent = tok.pos;
    group.appendChild(form);
    group.appendChild(pos);
    group.addEventListener("click", (event) =>
      handlers.onTokenClick(i, (event as MouseEvent).shiftKey)
    );
    svg.appendChild(group);
  });

  container.appendChild(svg);
}
