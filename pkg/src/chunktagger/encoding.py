"""Bidirectional codec between depth-limited trees and structural tags.

Each word carries a tag ``<r, t?, c?, g?>``: the structural relation to the
previous word, and optionally the word's POS, the category of its parent
node and a one-letter digest of its grandparent's category.  Seven relation
values cover trees whose tokens sit at most 3 node levels below their
top-level chunk root; the reduced depth-2 scheme keeps four of them and one
node level.

Text rendering joins the active dimensions with ``|``, e.g. ``++|ADJA|AP|N``;
one sentence per line, tags whitespace-separated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .corpus import (
    DEFAULT_MAX_DEPTH,
    Sentence,
    Token,
    TreeNode,
    Treebank,
    ancestor_paths,
    flatten_sentence,
    sentence_from_forest,
    token_depths,
)

__all__ = [
    "ZERO", "PLUS", "PLUSPLUS", "MINUS", "MINUSMINUS", "EQUAL", "ONE",
    "RELATIONS", "DEPTH2_RELATIONS",
    "OUTSIDE", "FALLBACK_LABEL", "NO_FLAG",
    "StructuralTag", "EncodingScheme", "DecodeResult", "TagInventory",
    "DepthError",
    "relation_at", "encode_sentence", "decode_tags", "tag_alphabet",
    "render_tag", "parse_tag", "render_tag_line", "grandparent_flag",
]

# Relation values, rendered exactly as in the tag files.
ZERO = "0"
PLUS = "+"
PLUSPLUS = "++"
MINUS = "-"
MINUSMINUS = "--"
EQUAL = "="
ONE = "1"

RELATIONS = (ZERO, PLUS, PLUSPLUS, MINUS, MINUSMINUS, EQUAL, ONE)
DEPTH2_RELATIONS = (ONE, ZERO, PLUS, MINUS)

OUTSIDE = "O"          # c value for words outside any chunk
FALLBACK_LABEL = "X"   # node label when no evidence is available
NO_FLAG = "-"          # g value when there is no grandparent

# Deepest legal token position (TreeNode ancestors below the chunk root)
# per scheme depth: with four relations one can open or close only a
# single level, so depth 2 keeps one inner level.
_MAX_TOKEN_DEPTH = {2: 1, 3: DEFAULT_MAX_DEPTH}


class DepthError(ValueError):
    """Sentence exceeds the representable depth in strict mode."""


class StructuralTag(NamedTuple):
    """Per-word structural tag; inactive dimensions are None."""

    r: str
    t: Optional[str] = None
    c: Optional[str] = None
    g: Optional[str] = None


def _default_coord_test(label: str) -> bool:
    return len(label) > 1 and label.startswith("C")


@dataclass(frozen=True)
class EncodingScheme:
    """Which tag dimensions are active, and the depth regime.

    ``dims`` is a subset of "rtcg" in canonical order and always contains
    "r"; ``g`` requires ``c``.  ``coord_labels`` overrides the default
    NEGRA-style test (labels starting with "C") for the coordination flag;
    ``coord_resolve_label`` is the label used when a pending node can only
    be named from a C flag.
    """

    dims: str = "rtcg"
    depth: int = 3
    coord_labels: Optional[frozenset] = None
    coord_resolve_label: str = "CNP"

    def __post_init__(self):
        canonical = "".join(d for d in "rtcg" if d in self.dims)
        if canonical != self.dims or len(set(self.dims)) != len(self.dims):
            raise ValueError("dims must be in canonical r,t,c,g order")
        if "r" not in self.dims:
            raise ValueError("dims must contain r")
        if "g" in self.dims and "c" not in self.dims:
            raise ValueError("g requires c")
        if self.depth not in (2, 3):
            raise ValueError("depth must be 2 or 3")

    @property
    def has_t(self) -> bool:
        return "t" in self.dims

    @property
    def has_c(self) -> bool:
        return "c" in self.dims

    @property
    def has_g(self) -> bool:
        return "g" in self.dims

    @property
    def max_token_depth(self) -> int:
        return _MAX_TOKEN_DEPTH[self.depth]

    @property
    def relations(self) -> tuple:
        return RELATIONS if self.depth == 3 else DEPTH2_RELATIONS

    def is_coordinated(self, label: str) -> bool:
        if self.coord_labels is not None:
            return label in self.coord_labels
        return _default_coord_test(label)


def _parent(path, k: int):
    """k-th parent along an ancestor chain (root-first), None if absent."""
    return path[len(path) - k] if 1 <= k <= len(path) else None


def _relation(prev_path, cur_path) -> str:
    """First condition that holds, in the pinned order 0 + ++ - -- =, else 1.

    Conditions compare nodes by identity; a chain that leaves the top-level
    chunk is undefined and the comparison fails."""
    checks = (
        (1, 1, ZERO),
        (1, 2, PLUS),
        (1, 3, PLUSPLUS),
        (2, 1, MINUS),
        (3, 1, MINUSMINUS),
        (2, 2, EQUAL),
    )
    for k_cur, k_prev, rel in checks:
        a = _parent(cur_path, k_cur)
        b = _parent(prev_path, k_prev)
        if a is not None and a is b:
            return rel
    return ONE


def relation_at(sentence: Sentence, i: int) -> str:
    """Structural relation between word i and word i-1 (depth-3 inventory)."""
    n = len(sentence.tokens)
    if not 1 <= i < n:
        raise IndexError("word index %d out of range 1..%d" % (i, n - 1))
    paths = ancestor_paths(sentence)
    return _relation(paths[i - 1], paths[i])


def grandparent_flag(scheme: EncodingScheme, grandparent) -> str:
    """A / N / C digest of the grandparent node, '-' when there is none."""
    if grandparent is None:
        return NO_FLAG
    label = grandparent.label
    if label == "AP":
        return "A"
    if label in ("NP", "PP"):
        return "N"
    if scheme.is_coordinated(label):
        return "C"
    return NO_FLAG


def encode_sentence(
    sentence: Sentence,
    scheme: EncodingScheme,
    strict: bool = False,
) -> list:
    """One structural tag per word.

    Word 0 gets the sentence-initial convention r=ONE.  Sentences deeper
    than the corpus bound raise DepthError in strict mode and are flattened
    otherwise; the depth-2 scheme always encodes the flattened tree, and a
    residual '=' (adjacent sibling nodes survive depth-2 flattening) maps
    to '0'.
    """
    depths = token_depths(sentence)
    if depths and max(depths) > DEFAULT_MAX_DEPTH and strict:
        raise DepthError(
            "token depth %d exceeds %d" % (max(depths), DEFAULT_MAX_DEPTH)
        )
    if depths and max(depths) > scheme.max_token_depth:
        sentence, _ = flatten_sentence(sentence, scheme.max_token_depth)

    paths = ancestor_paths(sentence)
    tags = []
    for i, token in enumerate(sentence.tokens):
        if i == 0:
            rel = ONE
        else:
            rel = _relation(paths[i - 1], paths[i])
        if scheme.depth == 2 and rel == EQUAL:
            rel = ZERO
        t = token.pos if scheme.has_t else None
        c = None
        if scheme.has_c:
            parent = _parent(paths[i], 1)
            c = parent.label if parent is not None else OUTSIDE
        g = None
        if scheme.has_g:
            g = grandparent_flag(scheme, _parent(paths[i], 2))
        tags.append(StructuralTag(rel, t, c, g))
    return tags


class _OpenNode:
    """Mutable node while decoding; frozen into a TreeNode at the end."""

    __slots__ = ("label", "children", "pending_flag", "named")

    def __init__(self, label=None, pending_flag=None, named=False):
        self.label = label
        self.children = []
        self.pending_flag = pending_flag
        self.named = named


@dataclass
class DecodeResult:
    sentence: Sentence
    repairs: int = 0


def decode_tags(
    tokens: Sequence[Token],
    tags: Sequence[StructuralTag],
    scheme: EncodingScheme,
) -> DecodeResult:
    """Reconstruct a forest from structural tags, left to right.

    Inconsistent tags (attachment levels that do not exist, openings that
    would exceed the scheme depth, non-ONE relations after a bare token in
    a c-bearing scheme) are repaired by clamping to the nearest legal level;
    repairs are counted in the result.
    """
    if len(tokens) != len(tags):
        raise ValueError(
            "token/tag length mismatch: %d vs %d" % (len(tokens), len(tags))
        )
    max_len = scheme.max_token_depth + 1  # open nodes incl. the chunk root
    top = []        # finished top-level items (_OpenNode roots or Tokens)
    path = []       # open nodes, chunk root first
    repairs = 0

    def resolve(node: _OpenNode) -> TreeNode:
        label = node.label
        if label is None:
            flag = node.pending_flag
            if flag == "A":
                label = "AP"
            elif flag == "N":
                label = "NP"
            elif flag == "C":
                label = scheme.coord_resolve_label
            else:
                label = FALLBACK_LABEL
        children = tuple(
            resolve(c) if isinstance(c, _OpenNode) else c for c in node.children
        )
        return TreeNode(label, children)

    def attach(token: Token, tag: StructuralTag):
        node = path[-1]
        if not node.named:
            # the first word attached directly under a node names it
            if tag.c and tag.c != OUTSIDE:
                node.label = tag.c
            node.named = True
        node.children.append(token)

    def open_chunk(token: Token, tag: StructuralTag):
        # ONE semantics: close everything, start fresh
        path.clear()
        if scheme.has_c and tag.c == OUTSIDE:
            top.append(token)
            return
        if not scheme.has_c:
            # bare until proven chunk: promoted when something attaches
            top.append(token)
            return
        root = _OpenNode(label=tag.c if tag.c else None, named=True)
        root.children.append(token)
        top.append(root)
        path.append(root)

    def promote_last_bare(tag: StructuralTag) -> bool:
        """Wrap the previous bare token into a chunk root so a non-ONE tag
        has something to attach to.  Counts as a repair for c-bearing
        schemes, where bare was an explicit OUTSIDE claim."""
        nonlocal repairs
        if not top or not isinstance(top[-1], Token):
            return False
        prev = top.pop()
        label = None
        if scheme.has_c:
            repairs += 1
            if tag.c and tag.c != OUTSIDE:
                label = tag.c
        root = _OpenNode(label=label, named=label is not None)
        root.children.append(prev)
        top.append(root)
        path.append(root)
        return True

    for i, (token, tag) in enumerate(zip(tokens, tags)):
        rel = tag.r
        if i == 0:
            if rel != ONE:
                repairs += 1
            open_chunk(token, tag)
            continue
        if rel == ONE:
            open_chunk(token, tag)
            continue
        if not path and not promote_last_bare(tag):
            repairs += 1
            open_chunk(token, tag)
            continue

        if rel == ZERO:
            attach(token, tag)
        elif rel in (PLUS, PLUSPLUS):
            want = 1 if rel == PLUS else 2
            levels = min(want, len(path) - 1)
            if levels != want:
                repairs += 1
            del path[len(path) - levels:]
            attach(token, tag)
        elif rel in (MINUS, MINUSMINUS):
            want = 1 if rel == MINUS else 2
            levels = min(want, max_len - len(path))
            if levels != want:
                repairs += 1
            if levels <= 0:
                attach(token, tag)
            else:
                if levels == 2:
                    outer = _OpenNode(pending_flag=tag.g)
                    path[-1].children.append(outer)
                    path.append(outer)
                inner = _OpenNode(
                    label=tag.c if tag.c and tag.c != OUTSIDE else None,
                    named=True,
                )
                path[-1].children.append(inner)
                path.append(inner)
                inner.children.append(token)
        elif rel == EQUAL:
            if len(path) < 2:
                repairs += 1
                attach(token, tag)
            else:
                del path[-1]
                sibling = _OpenNode(
                    label=tag.c if tag.c and tag.c != OUTSIDE else None,
                    named=True,
                )
                path[-1].children.append(sibling)
                path.append(sibling)
                sibling.children.append(token)
        else:
            raise ValueError("unknown relation %r" % rel)

    forest = [resolve(item) if isinstance(item, _OpenNode) else item for item in top]
    return DecodeResult(sentence=sentence_from_forest(forest), repairs=repairs)


@dataclass(frozen=True)
class TagInventory:
    tags: frozenset
    tags_per_word: float


def tag_alphabet(tb: Treebank, scheme: EncodingScheme) -> TagInventory:
    """Distinct structural tags observed under the scheme, plus the mean
    number of alphabet tags compatible with each running word's POS."""
    tags = set()
    by_pos = {}
    token_pos = []
    for sentence in tb.sentences:
        sent_tags = encode_sentence(sentence, scheme)
        for token, tag in zip(sentence.tokens, sent_tags):
            tags.add(tag)
            by_pos.setdefault(token.pos, set()).add(tag)
            token_pos.append(token.pos)
    if token_pos:
        mean = sum(len(by_pos[p]) for p in token_pos) / len(token_pos)
    else:
        mean = 0.0
    return TagInventory(tags=frozenset(tags), tags_per_word=mean)


def render_tag(tag: StructuralTag, scheme: EncodingScheme) -> str:
    parts = [tag.r]
    if scheme.has_t:
        parts.append(tag.t if tag.t is not None else "")
    if scheme.has_c:
        parts.append(tag.c if tag.c is not None else "")
    if scheme.has_g:
        parts.append(tag.g if tag.g is not None else NO_FLAG)
    return "|".join(parts)


def parse_tag(text: str, scheme: EncodingScheme) -> StructuralTag:
    parts = text.split("|")
    expected = 1 + scheme.has_t + scheme.has_c + scheme.has_g
    if len(parts) != expected:
        raise ValueError(
            "tag %r has %d fields, scheme %s expects %d"
            % (text, len(parts), scheme.dims, expected)
        )
    it = iter(parts)
    r = next(it)
    if r not in RELATIONS:
        raise ValueError("unknown relation %r in tag %r" % (r, text))
    t = next(it) if scheme.has_t else None
    c = next(it) if scheme.has_c else None
    g = next(it) if scheme.has_g else None
    return StructuralTag(r, t or None, c or None, g or None)


def render_tag_line(tags: Iterable[StructuralTag], scheme: EncodingScheme) -> str:
    return " ".join(render_tag(t, scheme) for t in tags)
