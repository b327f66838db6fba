import pytest

from chunktagger.corpus import parse_bracketed
from chunktagger.chunker import ChunkerConfig
from chunktagger.evaluation import (
    cross_validate,
    gold_boundaries,
    learning_curve,
    score,
)
from chunktagger.synthesis import annotation_corpus

SAMPLE_NP = "(NP ein/ART (AP (PP in/APPR (MPN Tel/NE Aviv/NE)) lebender/ADJA) Maler/NN)"


def tb_of(*lines):
    return parse_bracketed("\n".join(lines))


def test_identical_treebanks_score_perfectly():
    tb = tb_of(SAMPLE_NP, "der/ART (NP Mann/NN) schlief/VVFIN")
    report = score(tb, tb)
    assert report.tag_accuracy == 1.0
    assert report.bracketing_precision == 1.0
    assert report.bracketing_recall == 1.0
    assert report.labelled_bracketing_precision == 1.0
    assert report.top_level_chunk_precision == 1.0
    assert report.top_level_chunk_recall == 1.0
    assert report.repair_count == 0


def test_flat_prediction_keeps_precision_loses_recall():
    gold = tb_of("(NP der/ART (MPN Tel/NE Aviv/NE))")
    pred = tb_of("(NP der/ART Tel/NE Aviv/NE)")
    report = score(gold, pred)
    assert report.bracketing_precision == 1.0  # the NP span matches
    assert report.bracketing_recall == 0.5     # MPN node missed
    assert report.top_level_chunk_precision == 0.0  # subtree differs


def test_labelled_equals_unlabelled_when_labels_right():
    gold = tb_of("(NP a/A b/B) (PP c/C)")
    pred = tb_of("(NP a/A b/B) (PP c/C)")
    report = score(gold, pred)
    assert report.lab_matched == report.brack_matched


def test_labelled_below_unlabelled_on_wrong_label():
    gold = tb_of("(NP a/A b/B)")
    pred = tb_of("(AP a/A b/B)")
    report = score(gold, pred)
    assert report.bracketing_precision == 1.0
    assert report.labelled_bracketing_precision == 0.0
    assert report.tag_accuracy == 1.0  # r values identical


def test_precision_recall_duality():
    gold = tb_of("(NP a/A (AP b/B) c/C)", "(PP x/X y/Y)")
    pred = tb_of("(NP a/A b/B c/C)", "(PP x/X) y/Y")
    fwd = score(gold, pred)
    rev = score(pred, gold)
    assert fwd.bracketing_precision == rev.bracketing_recall
    assert fwd.bracketing_recall == rev.bracketing_precision
    assert fwd.top_level_chunk_precision == rev.top_level_chunk_recall


def test_misaligned_corpora_rejected():
    gold = tb_of("(NP a/A)")
    pred = tb_of("(NP a/A)", "(NP b/B)")
    with pytest.raises(ValueError):
        score(gold, pred)
    pred2 = tb_of("(NP a/B)")
    with pytest.raises(ValueError):
        score(gold, pred2)


def test_tag_accuracy_invariant_under_relabeling():
    gold = tb_of("(NP der/ART (MPN Tel/NE Aviv/NE))")
    relabeled = tb_of("(AP der/ART (CNP Tel/NE Aviv/NE))")
    report = score(gold, relabeled)
    assert report.tag_accuracy == 1.0
    assert report.labelled_bracketing_precision == 0.0


def test_boundary_measure_ignores_internal_structure():
    gold = tb_of("(NP der/ART (MPN Tel/NE Aviv/NE))")
    pred = tb_of("(NP der/ART Tel/NE Aviv/NE)")
    report = score(gold, pred)
    assert report.boundary_precision == 1.0
    assert report.top_level_chunk_precision == 0.0


def test_gold_boundaries():
    sent = tb_of("der/ART (NP Mann/NN (PP im/APPR Haus/NN)) kam/VVFIN").sentences[0]
    assert gold_boundaries(sent).spans == ((1, 4),)


def test_cross_validate_identical_sentences_score_one():
    lines = ["(NP der/ART Mann/NN)"] * 10
    tb = tb_of(*lines)
    result = cross_validate(tb, ChunkerConfig(), folds=10, seed=1)
    assert result.mean.tag_accuracy == 1.0
    assert result.mean.top_level_chunk_precision == 1.0
    assert len(result.folds) == 10


def test_cross_validate_deterministic():
    tb = annotation_corpus(3, 60)
    a = cross_validate(tb, ChunkerConfig(), folds=10, seed=5)
    b = cross_validate(tb, ChunkerConfig(), folds=10, seed=5)
    assert a.mean.values == b.mean.values


def test_cross_validate_mean_is_fold_average():
    tb = annotation_corpus(9, 80)
    result = cross_validate(tb, ChunkerConfig(), folds=10, seed=2)
    for attr in ("tag_accuracy", "bracketing_precision", "top_level_chunk_precision"):
        values = [getattr(fold, attr) for fold in result.folds]
        assert getattr(result.mean, attr) == pytest.approx(sum(values) / len(values))
        assert min(values) <= getattr(result.mean, attr) <= max(values)


def test_cross_validate_needs_enough_sentences():
    tb = tb_of("(NP a/A)")
    with pytest.raises(ValueError):
        cross_validate(tb, ChunkerConfig(), folds=10)


def test_learning_curve_repeated_size_identical():
    tb = annotation_corpus(4, 100)
    curve = learning_curve(tb, ChunkerConfig(mode="interactive"), [30, 30], seed=3)
    assert len(curve) == 1  # same size keyed once
    curve2 = learning_curve(tb, ChunkerConfig(mode="interactive"), [30], seed=3)
    assert curve[30] == curve2[30]


def test_learning_curve_size_limit():
    tb = annotation_corpus(4, 50)
    with pytest.raises(ValueError):
        learning_curve(tb, ChunkerConfig(), [46], seed=0)


def test_report_rendering():
    tb = tb_of(SAMPLE_NP)
    report = score(tb, tb)
    text = report.render_text()
    assert "structural tags" in text
    assert "top-level chunks" in text
    machine = report.render_machine()
    assert "tag_accuracy=1.0" in machine
