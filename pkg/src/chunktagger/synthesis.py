"""Seeded random corpora for stress tests, protocol checks and benchmarks.

Corpora come from three generators:

* random_treebank: unconstrained random structures built by legal
  attachment walks, for codec round-trips and tagset checks.  Walks only
  take steps the relation inventory can express, and nodes opened two
  levels at once are labelled NP or AP so every label is recoverable.
* annotation_corpus: template German-like chunk grammar with controlled
  ambiguity and a long tail of POS variants, for learning curves and
  mode comparisons.
* pp_attachment_corpus: NP chunks with a postnominal PP that attaches
  into the NP or stays top-level with identical POS context, the
  irreducible ambiguity that attachment stripping removes.
"""

from __future__ import annotations

import random
from typing import Tuple

from .corpus import Sentence, Token, TreeNode, Treebank, sentence_from_forest
from .encoding import (
    EQUAL,
    MINUS,
    MINUSMINUS,
    ONE,
    PLUS,
    PLUSPLUS,
    ZERO,
    StructuralTag,
)

__all__ = [
    "random_sentence",
    "random_treebank",
    "annotation_corpus",
    "pp_attachment_corpus",
    "sample_trigram_tag_corpus",
]

POS_POOL = ("ART", "ADJA", "NN", "NE", "APPR", "ADV", "CARD", "PIS", "VVFIN", "KON")
LABEL_POOL = ("NP", "PP", "AP", "MPN", "CNP", "NM")
# labels recoverable from a grandparent flag, required for nodes whose
# label never reaches a c field (see MINUSMINUS decoding)
FLAG_SAFE_LABELS = ("NP", "AP")


class _Builder:
    """Left-to-right tree builder driven by relation actions; written
    independently of decode_tags so round-trip tests have two code paths."""

    def __init__(self):
        self.top = []
        self.path = []  # [label, children] pairs, root first

    def _fresh(self, label):
        return [label, []]

    def depth(self) -> int:
        return len(self.path)

    def apply(self, action: str, token: Token, label=None, outer_label=None):
        if action == ONE:
            self.path = []
            if label is None:
                self.top.append(token)
            else:
                node = self._fresh(label)
                node[1].append(token)
                self.top.append(node)
                self.path = [node]
            return
        if action == ZERO:
            self.path[-1][1].append(token)
        elif action == PLUS:
            self.path.pop()
            self.path[-1][1].append(token)
        elif action == PLUSPLUS:
            self.path.pop()
            self.path.pop()
            self.path[-1][1].append(token)
        elif action == MINUS:
            node = self._fresh(label)
            self.path[-1][1].append(node)
            self.path.append(node)
            node[1].append(token)
        elif action == MINUSMINUS:
            outer = self._fresh(outer_label)
            inner = self._fresh(label)
            self.path[-1][1].append(outer)
            outer[1].append(inner)
            self.path.extend([outer, inner])
            inner[1].append(token)
        elif action == EQUAL:
            self.path.pop()
            node = self._fresh(label)
            self.path[-1][1].append(node)
            self.path.append(node)
            node[1].append(token)
        else:
            raise ValueError(action)

    def finish(self) -> Sentence:
        def freeze(item):
            if isinstance(item, Token):
                return item
            label, children = item
            return TreeNode(label, tuple(freeze(c) for c in children))

        return sentence_from_forest(freeze(i) for i in self.top)


def _legal_actions(depth_now: int, max_len: int, allow_deep: bool) -> list:
    acts = [ONE]
    if depth_now >= 1:
        acts.append(ZERO)
    if depth_now >= 2:
        acts.append(PLUS)
        if allow_deep:
            acts.append(EQUAL)
    if allow_deep and depth_now >= 3:
        acts.append(PLUSPLUS)
    if 1 <= depth_now <= max_len - 1:
        acts.append(MINUS)
    if allow_deep and 1 <= depth_now <= max_len - 2:
        acts.append(MINUSMINUS)
    return acts


_ACTION_WEIGHTS = {
    ONE: 2.0,
    ZERO: 5.0,
    PLUS: 1.5,
    PLUSPLUS: 0.8,
    MINUS: 1.5,
    MINUSMINUS: 0.8,
    EQUAL: 0.7,
}


def random_sentence(
    rng: random.Random,
    depth: int = 3,
    mean_len: int = 8,
    pos_pool: Tuple[str, ...] = POS_POOL,
    label_pool: Tuple[str, ...] = LABEL_POOL,
    p_bare: float = 0.15,
) -> Sentence:
    """A random sentence the depth-``depth`` relation inventory can encode
    and decode exactly."""
    max_len = depth + 1 if depth == 3 else 2
    allow_deep = depth == 3
    n = max(1, int(rng.expovariate(1.0 / mean_len)) + 1)
    builder = _Builder()
    for i in range(n):
        token = Token("w%d" % i, rng.choice(pos_pool))
        if i == 0:
            acts = [ONE]
        else:
            acts = _legal_actions(builder.depth(), max_len, allow_deep)
        weights = [_ACTION_WEIGHTS[a] for a in acts]
        action = rng.choices(acts, weights)[0]
        label = None
        outer = None
        if action == ONE:
            if rng.random() >= p_bare:
                label = rng.choice(label_pool)
        elif action in (MINUS, EQUAL):
            label = rng.choice(label_pool)
        elif action == MINUSMINUS:
            label = rng.choice(label_pool)
            outer = rng.choice(FLAG_SAFE_LABELS)
        builder.apply(action, token, label=label, outer_label=outer)
    return builder.finish()


def random_treebank(seed: int, n_sentences: int, depth: int = 3, **kw) -> Treebank:
    rng = random.Random(seed)
    sentences = tuple(random_sentence(rng, depth=depth, **kw) for _ in range(n_sentences))
    return _treebank_from(sentences)


def _nodes(item):
    if isinstance(item, TreeNode):
        yield item
        for c in item.children:
            yield from _nodes(c)


# -- template corpus for protocol-level checks ----------------------------


def _zipf_choice(rng, pool):
    weights = [1.0 / (k + 1) for k in range(len(pool))]
    return rng.choices(range(len(pool)), weights)[0]


def _np(rng, det, nouns, adjs, preps):
    """NP chunk whose internal structure is a deterministic function of the
    determiner variant, so it is learnable from POS context alone; the
    Zipf tail over variants makes coverage the limiting factor."""
    d = _zipf_choice(rng, det)
    style = d % 4
    children = [Token("d", det[d])]
    if style == 1:
        children.append(Token("a", adjs[_zipf_choice(rng, adjs)]))
    elif style == 2:
        children.append(TreeNode("AP", (Token("a", adjs[_zipf_choice(rng, adjs)]),)))
    elif style == 3:
        children.append(
            TreeNode("AP", (
                TreeNode("PP", (
                    Token("p", preps[_zipf_choice(rng, preps)]),
                    Token("n", nouns[_zipf_choice(rng, nouns)]),
                )),
                Token("a", adjs[_zipf_choice(rng, adjs)]),
            ))
        )
    children.append(Token("n", nouns[_zipf_choice(rng, nouns)]))
    return TreeNode("NP", tuple(children))


def annotation_corpus(seed: int, n_sentences: int, tail_pos: int = 10) -> Treebank:
    """Chunk-per-phrase corpus with a Zipf tail of determiner/adjective/
    noun/preposition POS variants; structure is deterministic given POS,
    so precision is limited by how much of the tail training has seen."""
    rng = random.Random(seed)
    det = tuple("ART%d" % i for i in range(tail_pos))
    nouns = tuple("NN%d" % i for i in range(tail_pos)) + ("NE",)
    adjs = tuple("ADJA%d" % i for i in range(tail_pos))
    preps = tuple("APPR%d" % i for i in range(max(3, tail_pos // 2)))
    sentences = []
    for _ in range(n_sentences):
        forest = []
        forest.append(_np(rng, det, nouns, adjs, preps))
        if rng.random() < 0.6:
            forest.append(Token("v", "VVFIN"))
        if rng.random() < 0.7:
            p = preps[_zipf_choice(rng, preps)]
            inner = _np(rng, det, nouns, adjs, preps)
            forest.append(TreeNode("PP", (Token("p", p),) + inner.children))
        if rng.random() < 0.15:
            # boundary-ambiguous tail: ART N N is one chunk or two, a coin
            # flip the POS context cannot resolve but annotator spans can
            d = Token("d", det[_zipf_choice(rng, det) % len(det)])
            n1 = Token("n", nouns[_zipf_choice(rng, nouns)])
            n2 = Token("n", nouns[_zipf_choice(rng, nouns)])
            if rng.random() < 0.5:
                forest.append(TreeNode("NP", (d, n1, n2)))
            else:
                forest.append(TreeNode("NP", (d, n1)))
                forest.append(TreeNode("NP", (n2,)))
        if rng.random() < 0.25:
            forest.append(Token("x", "ADV"))
        sentences.append(sentence_from_forest(forest))
    return _treebank_from(sentences)


def pp_attachment_corpus(seed: int, n_sentences: int, p_attach: float = 0.5) -> Treebank:
    """NP + postnominal PP where attachment is a coin flip the POS context
    cannot resolve; stripping detaches the PP either way."""
    rng = random.Random(seed)
    sentences = []
    for _ in range(n_sentences):
        np_children = (Token("d", "ART"), Token("n", "NN"))
        pp = TreeNode("PP", (Token("p", "APPR"), Token("d", "ART"), Token("n", "NN")))
        if rng.random() < p_attach:
            forest = [TreeNode("NP", np_children + (pp,))]
        else:
            forest = [TreeNode("NP", np_children), pp]
        if rng.random() < 0.5:
            forest.append(Token("v", "VVFIN"))
        sentences.append(sentence_from_forest(forest))
    return _treebank_from(sentences)


def _treebank_from(sentences) -> Treebank:
    pos = frozenset(t.pos for s in sentences for t in s.tokens)
    cats = frozenset(
        n.label for s in sentences for item in s.forest for n in _nodes(item)
    )
    return Treebank(pos_alphabet=pos, category_alphabet=cats, sentences=tuple(sentences))


# -- known trigram source over structural tags -----------------------------


def sample_trigram_tag_corpus(
    seed: int,
    n_sentences: int,
    trigram_share: float = 0.15,
    noise: float = 0.08,
    mean_len: int = 9,
):
    """Tag/POS sequences from a fixed stochastic source over four (r, t)
    tags.  The POS hides which of two tags produced it, so context is the
    only signal: the choice is mostly predicted by the previous tag, a
    smaller share only by the previous two, and a noise floor by nothing,
    giving the unigram << bigram <~ trigram accuracy shape.

    Returns (tag_sequences, pos_sequences, alphabet)."""
    rng = random.Random(seed)
    alphabet = [
        StructuralTag(ONE, "P"),
        StructuralTag(ZERO, "P"),
        StructuralTag(ONE, "Q"),
        StructuralTag(ZERO, "Q"),
    ]
    by_pos = {"P": (0, 1), "Q": (2, 3)}
    # fixed preference tables (-1 = boundary); balanced so unigram marginals
    # stay near 50/50 within each POS
    g2 = {
        "P": {-1: 0, 0: 1, 1: 0, 2: 0, 3: 1},
        "Q": {-1: 2, 0: 2, 1: 3, 2: 3, 3: 2},
    }
    # after (prev1=3, pos=Q) the outcome depends on prev2 only
    f3 = {-1: 2, 0: 2, 1: 3, 2: 2, 3: 3}

    tag_seqs = []
    pos_seqs = []
    for _ in range(n_sentences):
        length = max(2, int(rng.gauss(mean_len, 2)))
        prev2, prev1 = -1, -1
        ids = []
        for _i in range(length):
            pos = rng.choice("PQ")
            if rng.random() < noise:
                z = rng.choice(by_pos[pos])
            elif prev1 == 3 and pos == "Q":
                z = f3[prev2]
            else:
                z = g2[pos][prev1]
            ids.append(z)
            prev2, prev1 = prev1, z
        tag_seqs.append([alphabet[i] for i in ids])
        pos_seqs.append([alphabet[i].t for i in ids])
    return tag_seqs, pos_seqs, alphabet
