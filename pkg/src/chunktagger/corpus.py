"""Data model for POS-tagged sentences and depth-limited constituent trees.

The on-disk corpus format is line-oriented UTF-8 text, one sentence per
line.  A chunk is written ``(LABEL child child ...)``, a token ``form/POS``
(the POS is whatever follows the last slash).  Tokens outside any chunk are
legal at top level and appear bare.  Optional header lines declare the
alphabets::

    #pos: ART NN NE APPR ADJA
    #cat: NP PP AP MPN
    (NP ein/ART (AP (PP in/APPR (MPN Tel/NE Aviv/NE)) lebender/ADJA) Maler/NN)

Any other line starting with ``#`` is a comment.  Parentheses and
whitespace cannot occur inside forms, POS symbols or labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

__all__ = [
    "CorpusFormatError",
    "Token",
    "TreeNode",
    "Sentence",
    "Treebank",
    "Child",
    "tree_depth",
    "token_depths",
    "ancestor_paths",
    "node_spans",
    "iter_nodes",
    "sentence_from_forest",
    "flatten_sentence",
    "parse_bracketed",
    "serialize_sentence",
    "serialize_treebank",
    "extract_chunks",
    "DEFAULT_MAX_DEPTH",
]

# Deepest token position the default (7-relation) encoding can represent:
# number of TreeNode ancestors strictly below the top-level chunk root.
DEFAULT_MAX_DEPTH = 3


class CorpusFormatError(ValueError):
    """Malformed bracketed input or invariant violation in corpus data."""


@dataclass(frozen=True)
class Token:
    """A surface form with its part-of-speech tag."""

    form: str
    pos: str

    def __post_init__(self):
        if not self.form:
            raise CorpusFormatError("token with empty form")
        if not self.pos:
            raise CorpusFormatError("token %r with missing POS" % self.form)


Child = Union["TreeNode", Token]


@dataclass(frozen=True)
class TreeNode:
    """A phrasal node over an ordered, contiguous sequence of children."""

    label: str
    children: tuple

    def __post_init__(self):
        if not self.label:
            raise CorpusFormatError("node with empty label")
        if not self.children:
            raise CorpusFormatError("node %s with no children" % self.label)


@dataclass(frozen=True)
class Sentence:
    """A token sequence plus its top-level forest.

    The forest covers every token exactly once; tokens outside any chunk
    appear bare at top level.
    """

    tokens: tuple
    forest: tuple

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class Treebank:
    pos_alphabet: frozenset
    category_alphabet: frozenset
    sentences: tuple
    flatten_warnings: int = field(default=0, compare=False)

    def __len__(self):
        return len(self.sentences)


def _yield_tokens(item: Child) -> Iterator[Token]:
    if isinstance(item, Token):
        yield item
    else:
        for child in item.children:
            yield from _yield_tokens(child)


def iter_nodes(item: Child) -> Iterator[TreeNode]:
    """All TreeNodes of a subtree in preorder."""
    if isinstance(item, TreeNode):
        yield item
        for child in item.children:
            yield from iter_nodes(child)


def sentence_from_forest(forest: Iterable[Child]) -> Sentence:
    forest = tuple(forest)
    tokens = tuple(t for item in forest for t in _yield_tokens(item))
    return Sentence(tokens=tokens, forest=forest)


def tree_depth(node: Child) -> int:
    """Nesting depth in node levels: 1 + max over children, tokens count 0."""
    if isinstance(node, Token):
        return 0
    return 1 + max(tree_depth(child) for child in node.children)


def ancestor_paths(sentence: Sentence) -> list:
    """Per token, the chain of TreeNode ancestors from the top-level chunk
    root down to the token's parent.  Bare tokens get an empty chain."""
    paths = [None] * len(sentence.tokens)
    pos = 0

    def walk(item: Child, chain: tuple):
        nonlocal pos
        if isinstance(item, Token):
            paths[pos] = chain
            pos += 1
        else:
            chain = chain + (item,)
            for child in item.children:
                walk(child, chain)

    for item in sentence.forest:
        walk(item, ())
    if pos != len(sentence.tokens):
        raise CorpusFormatError("forest does not cover the token sequence")
    return paths


def token_depths(sentence: Sentence) -> list:
    """Per token, the number of TreeNode ancestors strictly below its
    top-level chunk root (0 for bare tokens and direct root children)."""
    return [max(0, len(p) - 1) for p in ancestor_paths(sentence)]


def node_spans(sentence: Sentence) -> list:
    """(node, start, end) for every TreeNode, preorder, half-open spans."""
    out = []
    pos = 0

    def walk(item: Child):
        nonlocal pos
        if isinstance(item, Token):
            pos += 1
            return
        start = pos
        for child in item.children:
            walk(child)
        out.append((item, start, pos))

    spans = []
    for item in sentence.forest:
        walk(item)
    # preorder: sort by (start, -end) to put ancestors before descendants
    out.sort(key=lambda t: (t[1], -t[2]))
    spans.extend(out)
    return spans


def validate_sentence(sentence: Sentence, max_depth: int = DEFAULT_MAX_DEPTH):
    """Raise CorpusFormatError if the sentence breaks the depth bound or
    its forest does not cover the tokens."""
    depths = token_depths(sentence)  # also checks coverage
    if depths and max(depths) > max_depth:
        raise CorpusFormatError(
            "token depth %d exceeds maximum %d" % (max(depths), max_depth)
        )


def flatten_sentence(sentence: Sentence, max_depth: int = DEFAULT_MAX_DEPTH):
    """Splice out the deepest nodes until every token sits at most
    ``max_depth`` TreeNode levels below its top-level chunk root.

    Children of a depth-overflow node move into its parent.  Returns
    ``(sentence, splice_count)``.
    """
    splices = 0
    # A token with the top-level root plus max_depth inner ancestors is the
    # deepest legal position, so nodes survive up to max_depth + 1 levels.
    max_levels = max_depth + 1

    def rebuild(item: Child, nlevel: int):
        # nlevel counts TreeNode ancestors including `item` itself.
        nonlocal splices
        if isinstance(item, Token):
            return [item]
        if nlevel > max_levels:
            splices += 1
            out = []
            for child in item.children:
                out.extend(rebuild(child, nlevel))
            return out
        out = []
        for child in item.children:
            out.extend(rebuild(child, nlevel + 1))
        return [TreeNode(item.label, tuple(out))]

    new_forest = []
    for item in sentence.forest:
        new_forest.extend(rebuild(item, 1))
    if splices == 0:
        return sentence, 0
    return sentence_from_forest(new_forest), splices


def _lex(line: str) -> list:
    return line.replace("(", " ( ").replace(")", " ) ").split()


def _parse_token(atom: str, lineno: int) -> Token:
    form, sep, pos = atom.rpartition("/")
    if not sep or not form or not pos:
        raise CorpusFormatError(
            "line %d: token %r has no POS (expected form/POS)" % (lineno, atom)
        )
    return Token(form, pos)


def _parse_line(line: str, lineno: int) -> Sentence:
    atoms = _lex(line)
    stack = [[]]  # stack[0] collects the top-level forest
    labels = []
    i = 0
    while i < len(atoms):
        atom = atoms[i]
        if atom == "(":
            if i + 1 >= len(atoms) or atoms[i + 1] in ("(", ")"):
                raise CorpusFormatError("line %d: '(' without a label" % lineno)
            labels.append(atoms[i + 1])
            stack.append([])
            i += 2
        elif atom == ")":
            if len(stack) == 1:
                raise CorpusFormatError("line %d: unbalanced ')'" % lineno)
            children = stack.pop()
            label = labels.pop()
            if not children:
                raise CorpusFormatError(
                    "line %d: empty node (%s)" % (lineno, label)
                )
            stack[-1].append(TreeNode(label, tuple(children)))
            i += 1
        else:
            stack[-1].append(_parse_token(atom, lineno))
            i += 1
    if len(stack) != 1:
        raise CorpusFormatError("line %d: unclosed '('" % lineno)
    return sentence_from_forest(stack[0])


def parse_bracketed(
    text: str,
    strict: bool = True,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Treebank:
    """Parse bracketed text into a validated Treebank.

    In strict mode a sentence deeper than ``max_depth`` is an error; in
    lenient mode the deepest levels are flattened and counted in
    ``Treebank.flatten_warnings``.
    """
    declared_pos = set()
    declared_cat = set()
    sentences = []
    warnings = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("pos:"):
                declared_pos.update(body[4:].split())
            elif body.startswith("cat:"):
                declared_cat.update(body[4:].split())
            continue
        sentence = _parse_line(line, lineno)
        depths = token_depths(sentence)
        if depths and max(depths) > max_depth:
            if strict:
                raise CorpusFormatError(
                    "line %d: token depth %d exceeds %d (strict mode)"
                    % (lineno, max(depths), max_depth)
                )
            sentence, n = flatten_sentence(sentence, max_depth)
            warnings += n
        sentences.append((lineno, sentence))

    seen_pos = {t.pos for _, s in sentences for t in s.tokens}
    seen_cat = {n.label for _, s in sentences for item in s.forest
                for n in iter_nodes(item)}
    if declared_pos:
        extra = seen_pos - declared_pos
        if extra:
            raise CorpusFormatError(
                "POS tags not in declared alphabet: %s" % " ".join(sorted(extra))
            )
    if declared_cat:
        extra = seen_cat - declared_cat
        if extra:
            raise CorpusFormatError(
                "categories not in declared alphabet: %s" % " ".join(sorted(extra))
            )
    return Treebank(
        pos_alphabet=frozenset(declared_pos or seen_pos),
        category_alphabet=frozenset(declared_cat or seen_cat),
        sentences=tuple(s for _, s in sentences),
        flatten_warnings=warnings,
    )


def _serialize_item(item: Child) -> str:
    if isinstance(item, Token):
        return "%s/%s" % (item.form, item.pos)
    return "(%s %s)" % (item.label, " ".join(_serialize_item(c) for c in item.children))


def serialize_sentence(sentence: Sentence) -> str:
    return " ".join(_serialize_item(item) for item in sentence.forest)


def serialize_treebank(tb: Treebank, header: bool = True) -> str:
    lines = []
    if header:
        lines.append("#pos: " + " ".join(sorted(tb.pos_alphabet)))
        lines.append("#cat: " + " ".join(sorted(tb.category_alphabet)))
    for sentence in tb.sentences:
        lines.append(serialize_sentence(sentence))
    return "\n".join(lines) + "\n"


def extract_chunks(tb: Treebank, categories) -> Treebank:
    """One-chunk sentences for every maximal chunk of a requested category;
    material outside such chunks is dropped."""
    categories = set(categories)
    unknown = categories - set(tb.category_alphabet)
    if unknown:
        raise CorpusFormatError(
            "categories not in treebank: %s" % " ".join(sorted(unknown))
        )
    out = []

    def collect(item: Child):
        if isinstance(item, Token):
            return
        if item.label in categories:
            out.append(sentence_from_forest([item]))
            return
        for child in item.children:
            collect(child)

    for sentence in tb.sentences:
        for item in sentence.forest:
            collect(item)
    return Treebank(
        pos_alphabet=tb.pos_alphabet,
        category_alphabet=tb.category_alphabet,
        sentences=tuple(out),
    )
