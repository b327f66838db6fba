"""End-to-end chunking pipeline: training plus the two operating modes.

Stand-alone mode decodes unrestricted POS-tagged text.  Interactive mode
takes annotator-supplied chunk boundaries and recovers category and
internal structure; boundaries are enforced inside the Viterbi search via
per-position allowed-tag sets, so every returned analysis respects them
exactly.  The STRIPPED attachment regime detaches postnominal PPs and
focus adverbs before training, which removes the attachment decisions a
POS-based model cannot make.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .corpus import (
    Sentence,
    Token,
    Treebank,
    TreeNode,
    sentence_from_forest,
)
from .encoding import (
    NO_FLAG,
    ONE,
    OUTSIDE,
    ZERO,
    EncodingScheme,
    FALLBACK_LABEL,
    StructuralTag,
    decode_tags,
)
from .model import (
    ChunkModel,
    ModelError,
    collect_counts,
    deleted_interpolation_weights,
    viterbi_decode,
)

__all__ = [
    "ChunkerConfig",
    "BoundarySpec",
    "ChunkResult",
    "train",
    "strip_attachments",
    "strip_treebank",
    "tag_standalone",
    "tag_interactive",
]

INTERACTIVE = "interactive"
STANDALONE = "standalone"
FULL = "full"
STRIPPED = "stripped"


@dataclass(frozen=True)
class ChunkerConfig:
    scheme: EncodingScheme = field(default_factory=EncodingScheme)
    mode: str = STANDALONE
    attachment: str = FULL
    unknown_pos_policy: str = "unk"
    order: int = 3
    strict_depth: bool = False
    # attachment stripping knobs
    host_labels: frozenset = frozenset({"NP", "PP"})
    detach_labels: frozenset = frozenset({"PP"})
    noun_pos: frozenset = frozenset({"NN", "NE"})
    focus_adverb_pos: frozenset = frozenset()

    def __post_init__(self):
        if self.mode not in (INTERACTIVE, STANDALONE):
            raise ValueError("mode must be interactive or standalone")
        if self.attachment not in (FULL, STRIPPED):
            raise ValueError("attachment must be full or stripped")
        if self.unknown_pos_policy not in ("unk", "uniform", "strict"):
            raise ValueError("unknown_pos_policy must be unk, uniform or strict")


@dataclass(frozen=True)
class BoundarySpec:
    """Non-overlapping [start, end) token ranges marking chunk extents."""

    spans: tuple

    def __post_init__(self):
        spans = tuple(sorted(tuple(s) for s in self.spans))
        object.__setattr__(self, "spans", spans)
        prev_end = 0
        for start, end in spans:
            if start < 0 or end <= start:
                raise ValueError("bad span [%d, %d)" % (start, end))
            if start < prev_end:
                raise ValueError("overlapping spans")
            prev_end = end

    def check_range(self, n: int):
        if self.spans and self.spans[-1][1] > n:
            raise ValueError(
                "span [%d, %d) exceeds sentence length %d"
                % (self.spans[-1][0], self.spans[-1][1], n)
            )


@dataclass
class ChunkResult:
    """Decoded sentence plus diagnostics from tagging."""

    sentence: Sentence
    tags: list
    repairs: int = 0
    unknown_pos: tuple = ()
    infeasible_spans: tuple = ()


def train(tb: Treebank, config: ChunkerConfig) -> ChunkModel:
    """Strip attachments if configured, encode, count, fit weights."""
    if not tb.sentences:
        raise ModelError("cannot train on an empty treebank")
    if config.attachment == STRIPPED:
        tb = strip_treebank(tb, config)
    counts = collect_counts(tb, config.scheme, strict=config.strict_depth)
    weights = deleted_interpolation_weights(counts)
    return ChunkModel(config.scheme, counts, weights, order=config.order)


# -- attachment stripping -------------------------------------------------


def _yield_len(item) -> int:
    if isinstance(item, Token):
        return 1
    return sum(_yield_len(c) for c in item.children)


def _head_offset(node: TreeNode, noun_pos: frozenset) -> Optional[int]:
    """Offset (within the node's yield) of the head noun: the last direct
    token child with a noun POS, falling back to the last noun anywhere."""
    offset = 0
    head = None
    for child in node.children:
        if isinstance(child, Token):
            if child.pos in noun_pos:
                head = offset
            offset += 1
        else:
            offset += _yield_len(child)
    if head is not None:
        return head
    # fallback: deepest-last noun in the whole yield
    offset = 0
    for tok in _iter_yield(node):
        if tok.pos in noun_pos:
            head = offset
        offset += 1
    return head


def _iter_yield(item):
    if isinstance(item, Token):
        yield item
    else:
        for child in item.children:
            yield from _iter_yield(child)


def _detach_rightmost(node: TreeNode, config: ChunkerConfig):
    """One detachment step on the rightmost spine, outermost host first.
    Returns (new_node, detached_item) or None."""

    def rebuild_without_last(path):
        # path: chain of nodes from root to the host shedding its last child
        host = path[-1]
        new_host = TreeNode(host.label, host.children[:-1])
        for ancestor in reversed(path[:-1]):
            new_host = TreeNode(ancestor.label, ancestor.children[:-1] + (new_host,))
        return new_host

    path = [node]
    offset_of = {}
    pos = 0
    # absolute offsets of each spine node's yield start
    while True:
        cur = path[-1]
        offset_of[id(cur)] = pos
        last = cur.children[-1]
        if isinstance(last, TreeNode):
            pos += sum(_yield_len(c) for c in cur.children[:-1])
            path.append(last)
        else:
            break

    # recompute candidate at each spine node, outermost first
    for i, cur in enumerate(path):
        if cur.label not in config.host_labels or len(cur.children) < 2:
            continue
        last = cur.children[-1]
        start_of_last = offset_of[id(cur)] + sum(
            _yield_len(c) for c in cur.children[:-1]
        )
        if isinstance(last, TreeNode):
            if last.label in config.detach_labels:
                head = _head_offset(cur, config.noun_pos)
                if head is not None and (offset_of[id(cur)] + head) < start_of_last:
                    return rebuild_without_last(path[: i + 1]), last
        elif last.pos in config.focus_adverb_pos:
            return rebuild_without_last(path[: i + 1]), last
    return None


def _detach_leading_adverb(node: TreeNode, config: ChunkerConfig):
    """Detach a focus adverb sitting on the leftmost edge of a host node."""
    path = [node]
    while isinstance(path[-1].children[0], TreeNode):
        path.append(path[-1].children[0])
    for i, cur in enumerate(path):
        if cur.label not in config.host_labels or len(cur.children) < 2:
            continue
        first = cur.children[0]
        if isinstance(first, Token) and first.pos in config.focus_adverb_pos:
            host = TreeNode(cur.label, cur.children[1:])
            for ancestor in reversed(path[:i]):
                host = TreeNode(ancestor.label, (host,) + ancestor.children[1:])
            return host, first
    return None


def _strip_item(item, config: ChunkerConfig) -> list:
    if isinstance(item, Token):
        return [item]
    lead = []
    trail = []
    node = item
    while True:
        hit = _detach_leading_adverb(node, config)
        if hit is None:
            break
        node, adverb = hit
        lead.append(adverb)
    while True:
        hit = _detach_rightmost(node, config)
        if hit is None:
            break
        node, detached = hit
        if isinstance(detached, Token):
            trail.insert(0, detached)
        else:
            trail = _strip_item(detached, config) + trail
    return lead + [node] + trail


def strip_attachments(sentence: Sentence, config: ChunkerConfig) -> Sentence:
    """Detach postnominal PPs and focus adverbs from NP/PP hosts into
    independent top-level chunks; prenominal material stays put."""
    forest = []
    for item in sentence.forest:
        forest.extend(_strip_item(item, config))
    return sentence_from_forest(forest)


def strip_treebank(tb: Treebank, config: ChunkerConfig) -> Treebank:
    return Treebank(
        pos_alphabet=tb.pos_alphabet,
        category_alphabet=tb.category_alphabet,
        sentences=tuple(strip_attachments(s, config) for s in tb.sentences),
    )


# -- tagging ---------------------------------------------------------------


def _as_tokens(words) -> tuple:
    out = []
    for w in words:
        if isinstance(w, Token):
            out.append(w)
        elif isinstance(w, str):
            out.append(Token(w, w))
        else:
            form, pos = w
            out.append(Token(form, pos))
    return tuple(out)


def tag_standalone(
    model: ChunkModel,
    words,
    unknown_pos_policy: str = "unk",
) -> ChunkResult:
    """Full chunking of a POS-tagged sequence, boundaries included."""
    tokens = _as_tokens(words)
    pos_seq = [t.pos for t in tokens]
    tags = viterbi_decode(model, pos_seq, None, unknown_pos_policy)
    decoded = decode_tags(tokens, tags, model.scheme)
    unknown = tuple(
        i for i, p in enumerate(pos_seq) if p not in model.pos_alphabet
    )
    return ChunkResult(
        sentence=decoded.sentence,
        tags=tags,
        repairs=decoded.repairs,
        unknown_pos=unknown,
    )


def _constraint_classes(model: ChunkModel):
    """Alphabet split into (outside, span-first, span-inside) tag sets."""
    outside, first, inside = [], [], []
    has_c = model.scheme.has_c
    for tag in model.alphabet:
        if tag.r == ONE:
            if has_c and tag.c == OUTSIDE:
                outside.append(tag)
            else:
                first.append(tag)
                if not has_c:
                    outside.append(tag)
        else:
            inside.append(tag)
    return outside, first, inside


def _fallback_label(model: ChunkModel) -> str:
    """Most frequent non-OUTSIDE parent category in training, else X."""
    if not model.scheme.has_c:
        return FALLBACK_LABEL
    best, best_n = FALLBACK_LABEL, 0
    for tag_id, tag in enumerate(model.alphabet):
        if tag.c and tag.c != OUTSIDE:
            n = model.counts.unigram.get(tag_id, 0)
            if n > best_n:
                best, best_n = tag.c, n
    return best


def _synth_tag(model: ChunkModel, rel: str, pos: str, label: Optional[str]) -> StructuralTag:
    scheme = model.scheme
    return StructuralTag(
        rel,
        pos if scheme.has_t else None,
        label if scheme.has_c else None,
        NO_FLAG if scheme.has_g else None,
    )


def tag_interactive(
    model: ChunkModel,
    words,
    boundaries: BoundarySpec,
    unknown_pos_policy: str = "unk",
) -> ChunkResult:
    """Recover category and internal structure for annotator-supplied
    chunk boundaries.

    Every position is constrained: outside spans to chunk-free ONE tags,
    span starts to chunk-opening ONE tags, span insides to non-ONE tags.
    A span for which no constrained analysis exists falls back to a flat
    chunk and is reported in ``infeasible_spans``."""
    tokens = _as_tokens(words)
    n = len(tokens)
    pos_seq = [t.pos for t in tokens]
    boundaries.check_range(n)

    span_of = {}
    role = ["outside"] * n
    for span in boundaries.spans:
        start, end = span
        role[start] = "first"
        span_of[start] = span
        for i in range(start + 1, end):
            role[i] = "inside"
            span_of[i] = span

    outside_tags, first_tags, inside_tags = _constraint_classes(model)
    class_for = {"outside": outside_tags, "first": first_tags, "inside": inside_tags}

    compatible = _compatibility_checker(model, unknown_pos_policy)
    constraints = []
    infeasible_positions = set()
    for i in range(n):
        allowed = [t for t in class_for[role[i]] if compatible(t, pos_seq[i])]
        if allowed:
            constraints.append(allowed)
        else:
            infeasible_positions.add(i)
            constraints.append(None)  # relax; synthesized afterwards

    tags = viterbi_decode(model, pos_seq, constraints, unknown_pos_policy)

    bad_spans = sorted({span_of[i] for i in infeasible_positions if i in span_of})
    label = _fallback_label(model)
    for start, end in bad_spans:
        tags[start] = _synth_tag(model, ONE, pos_seq[start], label)
        for i in range(start + 1, end):
            tags[i] = _synth_tag(model, ZERO, pos_seq[i], label)
    for i in infeasible_positions:
        if i not in span_of:
            tags[i] = _synth_tag(model, ONE, pos_seq[i], OUTSIDE)

    decoded = decode_tags(tokens, tags, model.scheme)
    sentence = _force_span_chunks(decoded.sentence, boundaries, label)
    unknown = tuple(i for i, p in enumerate(pos_seq) if p not in model.pos_alphabet)
    return ChunkResult(
        sentence=sentence,
        tags=tags,
        repairs=decoded.repairs,
        unknown_pos=unknown,
        infeasible_spans=tuple(bad_spans),
    )


def _compatibility_checker(model: ChunkModel, policy: str):
    if model.scheme.has_t:
        known_pos = model.pos_alphabet

        def check(tag: StructuralTag, pos: str) -> bool:
            if pos in known_pos:
                return tag.t == pos
            return True  # unknown POS: emission handled by policy

        return check
    return lambda tag, pos: True


def _force_span_chunks(sentence: Sentence, boundaries: BoundarySpec, label: str) -> Sentence:
    """Wrap any requested span that decoded to a single bare token (possible
    in c-less schemes) into a one-node chunk so spans and top-level chunks
    coincide exactly."""
    singles = {s for s in boundaries.spans if s[1] - s[0] == 1}
    if not singles:
        return sentence
    forest = []
    pos = 0
    changed = False
    for item in sentence.forest:
        width = _yield_len(item)
        if isinstance(item, Token) and (pos, pos + 1) in singles:
            forest.append(TreeNode(label, (item,)))
            changed = True
        else:
            forest.append(item)
        pos += width
    if not changed:
        return sentence
    return sentence_from_forest(forest)
