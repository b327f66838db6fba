"""Chunking evaluation: the four precision measures plus recall.

tags        fraction of words whose structural relation (r) is correct
bracketing  nodes matched by span (with multiplicity)
l.brack     nodes matched by span and category
top chunks  maximal chunks reproduced exactly (whole subtree and labels)

A span-only match of top-level chunks is reported separately as the
boundary measure.  Precision divides by predicted counts, recall by gold
counts; sentence pairs must share their token sequences.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, fields
from typing import Dict, Iterable, Optional, Sequence

from .corpus import Sentence, Token, TreeNode, Treebank, node_spans
from .chunker import (
    INTERACTIVE,
    STRIPPED,
    BoundarySpec,
    ChunkerConfig,
    strip_treebank,
    tag_interactive,
    tag_standalone,
    train,
)
from .encoding import EncodingScheme, encode_sentence

__all__ = [
    "EvalReport",
    "CrossValidation",
    "score",
    "cross_validate",
    "learning_curve",
    "gold_boundaries",
]


def _safe_ratio(num: int, den: int) -> float:
    return num / den if den else 1.0


@dataclass
class EvalReport:
    tag_correct: int = 0
    tag_total: int = 0
    brack_matched: int = 0
    brack_pred: int = 0
    brack_gold: int = 0
    lab_matched: int = 0
    chunk_matched: int = 0
    chunk_pred: int = 0
    chunk_gold: int = 0
    boundary_matched: int = 0
    repair_count: int = 0

    @property
    def tag_accuracy(self) -> float:
        return _safe_ratio(self.tag_correct, self.tag_total)

    @property
    def bracketing_precision(self) -> float:
        return _safe_ratio(self.brack_matched, self.brack_pred)

    @property
    def bracketing_recall(self) -> float:
        return _safe_ratio(self.brack_matched, self.brack_gold)

    @property
    def labelled_bracketing_precision(self) -> float:
        return _safe_ratio(self.lab_matched, self.brack_pred)

    @property
    def labelled_bracketing_recall(self) -> float:
        return _safe_ratio(self.lab_matched, self.brack_gold)

    @property
    def top_level_chunk_precision(self) -> float:
        return _safe_ratio(self.chunk_matched, self.chunk_pred)

    @property
    def top_level_chunk_recall(self) -> float:
        return _safe_ratio(self.chunk_matched, self.chunk_gold)

    @property
    def boundary_precision(self) -> float:
        return _safe_ratio(self.boundary_matched, self.chunk_pred)

    @property
    def boundary_recall(self) -> float:
        return _safe_ratio(self.boundary_matched, self.chunk_gold)

    _MEASURES = (
        ("tag_accuracy", "structural tags (r)"),
        ("bracketing_precision", "bracketing precision"),
        ("bracketing_recall", "bracketing recall"),
        ("labelled_bracketing_precision", "labelled bracketing precision"),
        ("labelled_bracketing_recall", "labelled bracketing recall"),
        ("top_level_chunk_precision", "top-level chunks precision"),
        ("top_level_chunk_recall", "top-level chunks recall"),
        ("boundary_precision", "boundary precision"),
        ("boundary_recall", "boundary recall"),
    )

    def render_text(self) -> str:
        width = max(len(label) for _, label in self._MEASURES)
        lines = []
        for attr, label in self._MEASURES:
            lines.append("%-*s  %6.2f%%" % (width, label, 100.0 * getattr(self, attr)))
        lines.append("%-*s  %6d" % (width, "decoder repairs", self.repair_count))
        return "\n".join(lines)

    def render_machine(self) -> str:
        pairs = [(attr, getattr(self, attr)) for attr, _ in self._MEASURES]
        pairs += [(f.name, getattr(self, f.name)) for f in fields(self)]
        return "\n".join("%s=%s" % (k, v) for k, v in pairs)


def _canonical(node: TreeNode) -> str:
    if isinstance(node, Token):
        return node.pos
    return "(%s %s)" % (node.label, " ".join(_canonical(c) for c in node.children))


def _sentence_stats(gold: Sentence, pred: Sentence, scheme: EncodingScheme, report: EvalReport):
    if [t.pos for t in gold.tokens] != [t.pos for t in pred.tokens]:
        raise ValueError("misaligned sentences: token sequences differ")
    gold_r = [t.r for t in encode_sentence(gold, scheme)]
    pred_r = [t.r for t in encode_sentence(pred, scheme)]
    report.tag_total += len(gold_r)
    report.tag_correct += sum(1 for a, b in zip(gold_r, pred_r) if a == b)

    gold_nodes = node_spans(gold)
    pred_nodes = node_spans(pred)
    gold_spans = Counter((s, e) for _n, s, e in gold_nodes)
    pred_spans = Counter((s, e) for _n, s, e in pred_nodes)
    report.brack_matched += sum((gold_spans & pred_spans).values())
    report.brack_pred += sum(pred_spans.values())
    report.brack_gold += sum(gold_spans.values())
    gold_lab = Counter((s, e, n.label) for n, s, e in gold_nodes)
    pred_lab = Counter((s, e, n.label) for n, s, e in pred_nodes)
    report.lab_matched += sum((gold_lab & pred_lab).values())

    gold_chunks = _top_chunks(gold)
    pred_chunks = _top_chunks(pred)
    report.chunk_pred += len(pred_chunks)
    report.chunk_gold += len(gold_chunks)
    report.chunk_matched += sum(
        (Counter(gold_chunks) & Counter(pred_chunks)).values()
    )
    gold_b = Counter((s, e) for s, e, _c in gold_chunks)
    pred_b = Counter((s, e) for s, e, _c in pred_chunks)
    report.boundary_matched += sum((gold_b & pred_b).values())


def _top_chunks(sentence: Sentence) -> list:
    out = []
    pos = 0
    for item in sentence.forest:
        if isinstance(item, Token):
            pos += 1
            continue
        width = sum(1 for _ in _tokens_of(item))
        out.append((pos, pos + width, _canonical(item)))
        pos += width
    return out


def _tokens_of(item):
    if isinstance(item, Token):
        yield item
    else:
        for child in item.children:
            yield from _tokens_of(child)


def score(
    gold: Treebank,
    predicted: Treebank,
    scheme: Optional[EncodingScheme] = None,
    repair_count: int = 0,
) -> EvalReport:
    """Compare aligned treebanks; raises on sentence or token mismatch."""
    if len(gold.sentences) != len(predicted.sentences):
        raise ValueError(
            "misaligned corpora: %d vs %d sentences"
            % (len(gold.sentences), len(predicted.sentences))
        )
    scheme = scheme if scheme is not None else EncodingScheme(dims="r")
    report = EvalReport(repair_count=repair_count)
    for g, p in zip(gold.sentences, predicted.sentences):
        _sentence_stats(g, p, scheme, report)
    return report


def gold_boundaries(sentence: Sentence) -> BoundarySpec:
    """Top-level chunk spans of a gold sentence (the annotator's input in
    interactive mode)."""
    return BoundarySpec(tuple((s, e) for s, e, _c in _top_chunks(sentence)))


def _tag_treebank(model, tb: Treebank, config: ChunkerConfig):
    predicted = []
    repairs = 0
    for sentence in tb.sentences:
        if config.mode == INTERACTIVE:
            result = tag_interactive(
                model, sentence.tokens, gold_boundaries(sentence),
                config.unknown_pos_policy,
            )
        else:
            result = tag_standalone(
                model, sentence.tokens, config.unknown_pos_policy
            )
        predicted.append(result.sentence)
        repairs += result.repairs
    return (
        Treebank(tb.pos_alphabet, tb.category_alphabet, tuple(predicted)),
        repairs,
    )


def _flatten_to_scheme(tb: Treebank, config: ChunkerConfig) -> Treebank:
    # a depth-2 scheme redefines the task: gold is its flattened view
    from .corpus import flatten_sentence, token_depths

    bound = config.scheme.max_token_depth
    out = []
    for s in tb.sentences:
        if s.tokens and max(token_depths(s)) > bound:
            s, _n = flatten_sentence(s, bound)
        out.append(s)
    return Treebank(tb.pos_alphabet, tb.category_alphabet, tuple(out))


def _eval_split(train_tb: Treebank, test_tb: Treebank, config: ChunkerConfig) -> EvalReport:
    model = train(train_tb, config)
    if config.attachment == STRIPPED:
        test_tb = strip_treebank(test_tb, config)
    test_tb = _flatten_to_scheme(test_tb, config)
    predicted, repairs = _tag_treebank(model, test_tb, config)
    return score(test_tb, predicted, config.scheme, repair_count=repairs)


@dataclass
class MeanReport:
    """Unweighted mean of per-fold measures; repair_count is the fold mean."""

    values: dict
    repair_count: float

    def __getattr__(self, name):
        values = object.__getattribute__(self, "values")
        if name in values:
            return values[name]
        raise AttributeError(name)

    def render_text(self) -> str:
        width = max(len(label) for _, label in EvalReport._MEASURES)
        lines = []
        for attr, label in EvalReport._MEASURES:
            lines.append("%-*s  %6.2f%%" % (width, label, 100.0 * self.values[attr]))
        lines.append("%-*s  %8.1f" % (width, "decoder repairs", self.repair_count))
        return "\n".join(lines)

    def render_machine(self) -> str:
        pairs = list(self.values.items()) + [("repair_count", self.repair_count)]
        return "\n".join("%s=%s" % (k, v) for k, v in pairs)


@dataclass
class CrossValidation:
    mean: MeanReport
    folds: list


def _mean_report(reports: Sequence[EvalReport]) -> MeanReport:
    n = len(reports)
    values = {
        attr: sum(getattr(r, attr) for r in reports) / n
        for attr, _label in EvalReport._MEASURES
    }
    repair = sum(r.repair_count for r in reports) / n
    return MeanReport(values=values, repair_count=repair)


def cross_validate(
    tb: Treebank,
    config: ChunkerConfig,
    folds: int = 10,
    seed: int = 0,
) -> CrossValidation:
    """Rotating 90/10 splits of a seeded shuffle, reports averaged.

    The mean report aggregates raw counts over folds; its fraction
    properties equal the unweighted mean of per-fold fractions when folds
    are equally sized, and per-fold reports are retained either way."""
    if len(tb.sentences) < folds:
        raise ValueError(
            "need at least %d sentences for %d folds" % (folds, folds)
        )
    order = list(tb.sentences)
    random.Random(seed).shuffle(order)
    reports = []
    n = len(order)
    for k in range(folds):
        lo = k * n // folds
        hi = (k + 1) * n // folds
        test = order[lo:hi]
        rest = order[:lo] + order[hi:]
        train_tb = Treebank(tb.pos_alphabet, tb.category_alphabet, tuple(rest))
        test_tb = Treebank(tb.pos_alphabet, tb.category_alphabet, tuple(test))
        reports.append(_eval_split(train_tb, test_tb, config))
    return CrossValidation(_mean_report(reports), reports)


def learning_curve(
    tb: Treebank,
    config: ChunkerConfig,
    sizes: Iterable[int],
    seed: int = 0,
) -> Dict[int, float]:
    """Top-level-chunk precision when training on growing prefixes of the
    shuffled 90% split, evaluated on the fixed 10% test split."""
    order = list(tb.sentences)
    random.Random(seed).shuffle(order)
    n = len(order)
    cut = n - n // 10
    pool, test = order[:cut], order[cut:]
    sizes = list(sizes)
    for size in sizes:
        if size > len(pool):
            raise ValueError(
                "size %d exceeds available training data (%d)" % (size, len(pool))
            )
    test_tb = Treebank(tb.pos_alphabet, tb.category_alphabet, tuple(test))
    out = {}
    for size in sizes:
        train_tb = Treebank(
            tb.pos_alphabet, tb.category_alphabet, tuple(pool[:size])
        )
        report = _eval_split(train_tb, test_tb, config)
        out[size] = report.top_level_chunk_precision
    return out
