"""Second-order Markov model over structural tags.

Counts are collected from tag sequences padded with two BOS boundary tags
at the start and one EOS at the end; EOS takes part in the objective, BOS
is context only.  Transition probabilities interpolate unigram, bigram and
trigram relative frequencies with weights fitted by deleted interpolation;
for a history whose bigram/trigram context was never seen, the weights of
the unavailable orders are redistributed so the distribution still sums to
one over the outcome space (alphabet plus EOS).

With the POS dimension active in the tag, the emission model is degenerate:
a tag emits exactly its own POS.  Without it, emissions are add-lambda
smoothed relative frequencies (lambda = 0.01) over the POS alphabet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import Treebank
from .encoding import EncodingScheme, StructuralTag, encode_sentence, parse_tag, render_tag
from . import _kernel

__all__ = [
    "BOS", "EOS", "UNK_POS",
    "ModelError", "UnknownPosError", "InfeasibleConstraintError",
    "TagAlphabet", "CountsTable", "InterpolationWeights", "ChunkModel",
    "collect_counts", "deleted_interpolation_weights",
    "transition_prob", "emission_prob", "viterbi_decode",
    "save_model", "load_model",
]

BOS = "<BOS>"
EOS = "<EOS>"
UNK_POS = "UNK"

# ids used in counts tables and model files for the boundary symbols
BOS_ID = -1
EOS_ID = -2

EMISSION_SMOOTHING = 0.01


class ModelError(ValueError):
    """Malformed model file or inconsistent model state."""


class UnknownPosError(KeyError):
    """A POS symbol outside the trained alphabet under the strict policy."""

    def __init__(self, position: int, pos: str):
        super().__init__(pos)
        self.position = position
        self.pos = pos


class InfeasibleConstraintError(ValueError):
    """No allowed tag remains for some position after constraints."""

    def __init__(self, position: int, message: str):
        super().__init__(message)
        self.position = position


class TagAlphabet:
    """Structural tags with integer ids in first-seen order."""

    def __init__(self, tags: Iterable[StructuralTag] = ()):
        self._tags = []
        self._ids = {}
        for tag in tags:
            self.add(tag)

    def add(self, tag: StructuralTag) -> int:
        tag_id = self._ids.get(tag)
        if tag_id is None:
            tag_id = len(self._tags)
            self._ids[tag] = tag_id
            self._tags.append(tag)
        return tag_id

    def id_of(self, tag: StructuralTag) -> int:
        try:
            return self._ids[tag]
        except KeyError:
            raise ModelError("tag %r not in alphabet" % (tag,))

    def __contains__(self, tag: StructuralTag) -> bool:
        return tag in self._ids

    def tag_of(self, tag_id: int) -> StructuralTag:
        return self._tags[tag_id]

    def __len__(self) -> int:
        return len(self._tags)

    def __iter__(self):
        return iter(self._tags)


class CountsTable:
    """Raw n-gram and emission counts over tag ids.

    unigram counts cover outcome positions (real tags plus one EOS per
    sequence); bigram/trigram entries end at outcome positions, so summing
    a table over its first coordinate reproduces the next lower one.
    """

    def __init__(self, alphabet: Optional[TagAlphabet] = None):
        self.alphabet = alphabet if alphabet is not None else TagAlphabet()
        self.unigram = {}
        self.bigram = {}
        self.trigram = {}
        self.emission = {}
        self.n_sequences = 0

    def add_sequence(self, ids: Sequence[int], pos_seq: Optional[Sequence[str]] = None):
        if not ids:
            raise ValueError("empty tag sequence")
        padded = [BOS_ID, BOS_ID] + list(ids) + [EOS_ID]
        for k in range(2, len(padded)):
            s2, s1, s = padded[k - 2], padded[k - 1], padded[k]
            self.unigram[s] = self.unigram.get(s, 0) + 1
            self.bigram[(s1, s)] = self.bigram.get((s1, s), 0) + 1
            self.trigram[(s2, s1, s)] = self.trigram.get((s2, s1, s), 0) + 1
        if pos_seq is not None:
            if len(pos_seq) != len(ids):
                raise ValueError("tag/POS length mismatch")
            for tag_id, pos in zip(ids, pos_seq):
                self.emission[(tag_id, pos)] = self.emission.get((tag_id, pos), 0) + 1
        self.n_sequences += 1

    @property
    def total(self) -> int:
        """Number of outcome positions (N)."""
        return sum(self.unigram.values())

    def context2(self) -> dict:
        """Occurrences of each id as bigram context."""
        out = {}
        for (s1, _s), n in self.bigram.items():
            out[s1] = out.get(s1, 0) + n
        return out

    def context3(self) -> dict:
        """Occurrences of each id pair as trigram context."""
        out = {}
        for (s2, s1, _s), n in self.trigram.items():
            out[(s2, s1)] = out.get((s2, s1), 0) + n
        return out

    def pos_alphabet(self) -> frozenset:
        return frozenset(pos for (_tag, pos) in self.emission)


@dataclass(frozen=True)
class InterpolationWeights:
    l1: float
    l2: float
    l3: float

    def __post_init__(self):
        total = self.l1 + self.l2 + self.l3
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise ValueError("weights sum to %r, expected 1" % total)
        if min(self.l1, self.l2, self.l3) < 0:
            raise ValueError("negative interpolation weight")


def collect_counts(
    tb: Treebank,
    scheme: EncodingScheme,
    alphabet: Optional[TagAlphabet] = None,
    strict: bool = False,
) -> CountsTable:
    """Encode every sentence and accumulate padded n-gram counts plus
    tag-to-POS emission counts.  The alphabet grows in first-seen order."""
    counts = CountsTable(alphabet)
    for sentence in tb.sentences:
        tags = encode_sentence(sentence, scheme, strict=strict)
        ids = [counts.alphabet.add(tag) for tag in tags]
        counts.add_sequence(ids, [t.pos for t in sentence.tokens])
    return counts


def counts_from_tag_sequences(sequences, alphabet: Optional[TagAlphabet] = None) -> CountsTable:
    """Counts from raw (tags, pos_seq) pairs, bypassing tree encoding;
    pos_seq may be None when emissions are not needed."""
    counts = CountsTable(alphabet)
    for tags, pos_seq in sequences:
        ids = [counts.alphabet.add(t) for t in tags]
        counts.add_sequence(ids, pos_seq)
    return counts


def deleted_interpolation_weights(counts: CountsTable) -> InterpolationWeights:
    """Successive deletion: each trigram type votes with its count for the
    order whose leave-one-out relative frequency is largest (ties go to the
    higher order); votes are normalized to weights."""
    n_total = counts.total
    if n_total == 0:
        raise ModelError("empty counts")
    ctx2 = counts.context2()
    ctx3 = counts.context3()

    def loo(num: int, den: int) -> float:
        return (num - 1) / (den - 1) if den > 1 else 0.0

    votes = [0, 0, 0]
    for (t1, t2, t3), c in counts.trigram.items():
        v3 = loo(c, ctx3[(t1, t2)])
        v2 = loo(counts.bigram.get((t2, t3), 0), ctx2.get(t2, 0))
        v1 = loo(counts.unigram.get(t3, 0), n_total)
        best = max(v1, v2, v3)
        if v3 >= best:
            votes[2] += c
        elif v2 >= best:
            votes[1] += c
        else:
            votes[0] += c
    total = sum(votes)
    return InterpolationWeights(votes[0] / total, votes[1] / total, votes[2] / total)


def _truncated_weights(weights: InterpolationWeights, order: int):
    if order == 3:
        return (weights.l1, weights.l2, weights.l3)
    if order == 2:
        mass = weights.l1 + weights.l2
        if mass <= 0:
            return (0.5, 0.5, 0.0)
        return (weights.l1 / mass, weights.l2 / mass, 0.0)
    if order == 1:
        return (1.0, 0.0, 0.0)
    raise ValueError("order must be 1, 2 or 3")


class ChunkModel:
    """A sealed, immutable trigram model over structural tags."""

    def __init__(
        self,
        scheme: EncodingScheme,
        counts: CountsTable,
        weights: InterpolationWeights,
        order: int = 3,
    ):
        if order not in (1, 2, 3):
            raise ValueError("order must be 1, 2 or 3")
        if len(counts.alphabet) == 0:
            raise ModelError("empty alphabet")
        for tag_id in range(len(counts.alphabet)):
            if counts.unigram.get(tag_id, 0) <= 0:
                raise ModelError(
                    "alphabet tag %d has no unigram count" % tag_id
                )
        self.scheme = scheme
        self.alphabet = counts.alphabet
        self.counts = counts
        self.weights = weights
        self.order = order
        self.lambdas = _truncated_weights(weights, order)
        self.pos_alphabet = counts.pos_alphabet()

        k = len(self.alphabet)
        self.eos_id = k
        self.bos_id = k + 1
        self._n = counts.total
        self._ctx2 = {self._map(i): n for i, n in counts.context2().items()}
        self._ctx3 = {
            (self._map(a), self._map(b)): n for (a, b), n in counts.context3().items()
        }
        self._uni = {self._map(i): n for i, n in counts.unigram.items()}
        self._bi = {
            (self._map(a), self._map(b)): n for (a, b), n in counts.bigram.items()
        }
        self._tri = {
            (self._map(a), self._map(b), self._map(c)): n
            for (a, b, c), n in counts.trigram.items()
        }
        self._emit_row = {}
        for (tag_id, _pos), n in counts.emission.items():
            self._emit_row[tag_id] = self._emit_row.get(tag_id, 0) + n

        by_pos = {}
        if scheme.has_t:
            for tag_id, tag in enumerate(self.alphabet):
                by_pos.setdefault(tag.t, []).append(tag_id)
        self.tags_by_pos = by_pos
        self._kernel_tables = _kernel.build_tables(self)

    def _map(self, i: int) -> int:
        """File/count ids use -1/-2 for BOS/EOS; internally they follow the
        alphabet so arrays can be dense."""
        if i == BOS_ID:
            return self.bos_id
        if i == EOS_ID:
            return self.eos_id
        return i

    def tag_id(self, s) -> int:
        if s is BOS or s == BOS:
            return self.bos_id
        if s is EOS or s == EOS:
            return self.eos_id
        return self.alphabet.id_of(s)

    # -- probability estimates ------------------------------------------

    def _p1(self, i0: int) -> float:
        return self._uni.get(i0, 0) / self._n

    def transition_prob_ids(self, i2: int, i1: int, i0: int) -> float:
        l1, l2, l3 = self.lambdas
        p = l1 * self._p1(i0)
        wnorm = l1
        c2 = self._ctx2.get(i1, 0)
        if c2 > 0:
            wnorm += l2
            p += l2 * self._bi.get((i1, i0), 0) / c2
        c3 = self._ctx3.get((i2, i1), 0)
        if c3 > 0:
            wnorm += l3
            p += l3 * self._tri.get((i2, i1, i0), 0) / c3
        if wnorm <= 0.0:
            return self._p1(i0)
        return p / wnorm

    def emission_prob_id(self, tag_id: int, pos: str) -> float:
        if self.scheme.has_t:
            return 1.0 if self.alphabet.tag_of(tag_id).t == pos else 0.0
        row = self._emit_row.get(tag_id, 0)
        k = len(self.pos_alphabet)
        count = self.counts.emission.get((tag_id, pos), 0)
        return (count + EMISSION_SMOOTHING) / (row + EMISSION_SMOOTHING * k)


def transition_prob(model: ChunkModel, s2, s1, s) -> float:
    """Interpolated P(s | s2, s1); accepts BOS for history and EOS for s."""
    return model.transition_prob_ids(
        model.tag_id(s2), model.tag_id(s1), model.tag_id(s)
    )


def emission_prob(model: ChunkModel, s: StructuralTag, t: str) -> float:
    """P(t | s): degenerate when the tag carries its POS, smoothed MLE
    otherwise."""
    return model.emission_prob_id(model.alphabet.id_of(s), t)


def _allowed_for_position(
    model: ChunkModel,
    i: int,
    pos: str,
    policy: str,
):
    """(allowed ids ascending, log emission per id, unknown_pos flag)."""
    known = pos in model.pos_alphabet
    k = len(model.alphabet)
    if model.scheme.has_t:
        if known:
            ids = model.tags_by_pos.get(pos, [])
            return ids, [0.0] * len(ids), False
        if policy == "strict":
            raise UnknownPosError(i, pos)
        if policy == "unk" and UNK_POS in model.tags_by_pos:
            ids = model.tags_by_pos[UNK_POS]
            return ids, [0.0] * len(ids), True
        # uniform emission over the whole alphabet
        level = math.log(1.0 / max(1, len(model.pos_alphabet)))
        return list(range(k)), [level] * k, True
    if not known and policy == "strict":
        raise UnknownPosError(i, pos)
    ids = list(range(k))
    logs = [math.log(model.emission_prob_id(t, pos)) for t in ids]
    return ids, logs, not known


def viterbi_decode(
    model: ChunkModel,
    pos_seq: Sequence[str],
    constraints: Optional[Sequence[Optional[Iterable[StructuralTag]]]] = None,
    unknown_pos_policy: str = "unk",
) -> list:
    """Exact argmax tag sequence for a POS sequence.

    ``constraints`` optionally narrows the allowed tag set per position.
    Ties are broken toward lower tag ids.  Work is linear in the sequence
    length for a fixed model.
    """
    if not pos_seq:
        raise ValueError("empty POS sequence")
    if constraints is not None and len(constraints) != len(pos_seq):
        raise ValueError("constraints length mismatch")

    allowed = []
    emis = []
    for i, pos in enumerate(pos_seq):
        ids, logs, _flag = _allowed_for_position(model, i, pos, unknown_pos_policy)
        if constraints is not None and constraints[i] is not None:
            wanted = set()
            for tag in constraints[i]:
                if tag in model.alphabet:
                    wanted.add(model.alphabet.id_of(tag))
            pairs = [(t, e) for t, e in zip(ids, logs) if t in wanted]
            ids = [t for t, _ in pairs]
            logs = [e for _, e in pairs]
        if not ids:
            raise InfeasibleConstraintError(
                i, "no allowed tag at position %d (pos %r)" % (i, pos)
            )
        allowed.append(ids)
        emis.append(logs)

    path, _score = _kernel.viterbi_path(model._kernel_tables, allowed, emis)
    return [model.alphabet.tag_of(t) for t in path]


def position_scores(
    model: ChunkModel,
    pos_seq: Sequence[str],
    tags: Sequence[StructuralTag],
):
    """Per-position log contributions (transition + emission) of a tag
    sequence, plus the closing EOS term.  Unknown tags or POS score -inf."""
    neg_inf = float("-inf")
    hist = [model.bos_id, model.bos_id]
    out = []
    for pos, tag in zip(pos_seq, tags):
        if tag in model.alphabet:
            tag_id = model.alphabet.id_of(tag)
            p_t = model.transition_prob_ids(hist[-2], hist[-1], tag_id)
            p_e = model.emission_prob_id(tag_id, pos)
            if p_t > 0.0 and p_e > 0.0:
                out.append(math.log(p_t) + math.log(p_e))
            else:
                out.append(neg_inf)
            hist.append(tag_id)
        else:
            out.append(neg_inf)
            hist.append(model.bos_id)  # history broken; keep going
    p_end = model.transition_prob_ids(hist[-2], hist[-1], model.eos_id)
    eos_term = math.log(p_end) if p_end > 0.0 else neg_inf
    return out, eos_term


def viterbi_score(model: ChunkModel, pos_seq: Sequence[str], tags: Sequence[StructuralTag]) -> float:
    """Log score of a full tag sequence under the model (EOS included)."""
    ids = [model.alphabet.id_of(t) for t in tags]
    hist = [model.bos_id, model.bos_id]
    total = 0.0
    for pos, tag_id in zip(pos_seq, ids):
        p_t = model.transition_prob_ids(hist[-2], hist[-1], tag_id)
        p_e = model.emission_prob_id(tag_id, pos)
        if p_t <= 0.0 or p_e <= 0.0:
            return float("-inf")
        total += math.log(p_t) + math.log(p_e)
        hist.append(tag_id)
    p_end = model.transition_prob_ids(hist[-2], hist[-1], model.eos_id)
    if p_end <= 0.0:
        return float("-inf")
    return total + math.log(p_end)


# -- model files ---------------------------------------------------------

FORMAT_NAME = "chunktagger-model"
FORMAT_VERSION = 1


def save_model(model: ChunkModel, path: str):
    lines = ["%s %d" % (FORMAT_NAME, FORMAT_VERSION)]
    lines.append("dims %s" % model.scheme.dims)
    lines.append("depth %d" % model.scheme.depth)
    lines.append("order %d" % model.order)
    if model.scheme.coord_labels is not None:
        lines.append("coordlabels %s" % " ".join(sorted(model.scheme.coord_labels)))
    if model.scheme.coord_resolve_label != "CNP":
        lines.append("coordresolve %s" % model.scheme.coord_resolve_label)
    lines.append("tags %d" % len(model.alphabet))
    for tag_id, tag in enumerate(model.alphabet):
        lines.append("%d %s" % (tag_id, render_tag(tag, model.scheme)))
    w = model.weights
    lines.append("lambda %r %r %r" % (w.l1, w.l2, w.l3))
    lines.append("counts")
    for i, n in sorted(model.counts.unigram.items()):
        lines.append("1 %d %d" % (i, n))
    for (a, b), n in sorted(model.counts.bigram.items()):
        lines.append("2 %d %d %d" % (a, b, n))
    for (a, b, c), n in sorted(model.counts.trigram.items()):
        lines.append("3 %d %d %d %d" % (a, b, c, n))
    for (tag_id, pos), n in sorted(model.counts.emission.items()):
        lines.append("E %d %s %d" % (tag_id, pos, n))
    lines.append("end")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path: str) -> ChunkModel:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    it = iter(enumerate(lines, start=1))

    def fail(lineno, msg):
        raise ModelError("%s:%d: %s" % (path, lineno, msg))

    try:
        lineno, header = next(it)
    except StopIteration:
        raise ModelError("%s: empty file" % path)
    parts = header.split()
    if len(parts) != 2 or parts[0] != FORMAT_NAME:
        fail(lineno, "not a chunktagger model file")
    if int(parts[1]) != FORMAT_VERSION:
        fail(lineno, "unsupported format version %s" % parts[1])

    meta = {}
    coord_labels = None
    coord_resolve = "CNP"
    for lineno, line in it:
        key, _, value = line.partition(" ")
        if key in ("dims", "depth", "order"):
            meta[key] = value
        elif key == "coordlabels":
            coord_labels = frozenset(value.split())
        elif key == "coordresolve":
            coord_resolve = value
        elif key == "tags":
            meta["tags"] = value
            break
        else:
            fail(lineno, "unexpected header line %r" % line)
    for field in ("dims", "depth", "order", "tags"):
        if field not in meta:
            raise ModelError("%s: missing %s header" % (path, field))

    scheme = EncodingScheme(
        dims=meta["dims"],
        depth=int(meta["depth"]),
        coord_labels=coord_labels,
        coord_resolve_label=coord_resolve,
    )
    n_tags = int(meta["tags"])
    alphabet = TagAlphabet()
    for _ in range(n_tags):
        lineno, line = next(it)
        tag_id_text, _, rendered = line.partition(" ")
        if int(tag_id_text) != len(alphabet):
            fail(lineno, "tag ids must be consecutive")
        alphabet.add(parse_tag(rendered, scheme))

    lineno, line = next(it)
    if not line.startswith("lambda "):
        fail(lineno, "expected lambda line")
    l1, l2, l3 = (float(x) for x in line.split()[1:4])
    lineno, line = next(it)
    if line != "counts":
        fail(lineno, "expected counts section")

    counts = CountsTable(alphabet)
    n_seq = 0
    for lineno, line in it:
        if line == "end":
            break
        parts = line.split()
        kind = parts[0]
        if kind == "1":
            counts.unigram[int(parts[1])] = int(parts[2])
        elif kind == "2":
            counts.bigram[(int(parts[1]), int(parts[2]))] = int(parts[3])
        elif kind == "3":
            counts.trigram[(int(parts[1]), int(parts[2]), int(parts[3]))] = int(parts[4])
        elif kind == "E":
            counts.emission[(int(parts[1]), parts[2])] = int(parts[3])
        else:
            fail(lineno, "unexpected count line %r" % line)
    else:
        raise ModelError("%s: missing end marker" % path)
    counts.n_sequences = counts.unigram.get(EOS_ID, 0)
    n_seq = counts.n_sequences
    if n_seq == 0:
        raise ModelError("%s: no sequences recorded" % path)
    return ChunkModel(
        scheme=scheme,
        counts=counts,
        weights=InterpolationWeights(l1, l2, l3),
        order=int(meta["order"]),
    )
