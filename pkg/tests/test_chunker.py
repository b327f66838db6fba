import random

import pytest

from chunktagger.corpus import Token, parse_bracketed, serialize_sentence
from chunktagger.encoding import ONE, tag_alphabet
from chunktagger.chunker import (
    BoundarySpec,
    ChunkerConfig,
    strip_attachments,
    tag_interactive,
    tag_standalone,
    train,
)
from chunktagger.model import ModelError, save_model
from chunktagger.synthesis import annotation_corpus, random_treebank

SAMPLE_NP = "(NP ein/ART (AP (PP in/APPR (MPN Tel/NE Aviv/NE)) lebender/ADJA) Maler/NN)"


def small_treebank():
    return parse_bracketed(
        "\n".join(
            [
                SAMPLE_NP,
                "der/ART (NP Mann/NN) schlief/VVFIN",
                "(NP eine/ART Frau/NN)",
                "(PP im/APPR (NP alten/ADJA Haus/NN))",
            ]
        )
    )


def test_train_alphabet_matches_tag_alphabet():
    tb = small_treebank()
    config = ChunkerConfig()
    model = train(tb, config)
    inv = tag_alphabet(tb, config.scheme)
    assert frozenset(model.alphabet) == inv.tags


def test_train_rejects_empty_treebank():
    tb = parse_bracketed("# nothing here\n")
    with pytest.raises(ModelError):
        train(tb, ChunkerConfig())


def test_train_deterministic_files(tmp_path):
    tb = small_treebank()
    p1, p2 = tmp_path / "a", tmp_path / "b"
    save_model(train(tb, ChunkerConfig()), str(p1))
    save_model(train(tb, ChunkerConfig()), str(p2))
    assert p1.read_bytes() == p2.read_bytes()


# -- stripping ---------------------------------------------------------------

CFG = ChunkerConfig()


def strip_line(text):
    sent = parse_bracketed(text).sentences[0]
    return serialize_sentence(strip_attachments(sent, CFG))


def test_strip_postnominal_pp():
    out = strip_line("(NP der/ART Mann/NN (PP im/APPR Haus/NN))")
    assert out == "(NP der/ART Mann/NN) (PP im/APPR Haus/NN)"


def test_strip_keeps_prenominal_material():
    text = "(NP der/ART (AP sehr/ADV alte/ADJA) Mann/NN)"
    assert strip_line(text) == text


def test_strip_keeps_prenominal_pp_inside_ap():
    assert strip_line(SAMPLE_NP) == SAMPLE_NP


def test_strip_bare_tokens_unchanged():
    assert strip_line("a/X b/Y") == "a/X b/Y"


def test_strip_nested_postnominal_pps():
    out = strip_line(
        "(NP der/ART Plan/NN (PP von/APPR (NP der/ART Stadt/NN (PP am/APPRART Meer/NN))))"
    )
    assert out == (
        "(NP der/ART Plan/NN) (PP von/APPR (NP der/ART Stadt/NN)) (PP am/APPRART Meer/NN)"
    )


def test_strip_focus_adverbs_at_edges():
    config = ChunkerConfig(focus_adverb_pos=frozenset({"ADV"}))
    sent = parse_bracketed("(NP nur/ADV der/ART Mann/NN)").sentences[0]
    out = serialize_sentence(strip_attachments(sent, config))
    assert out == "nur/ADV (NP der/ART Mann/NN)"


def test_strip_is_idempotent():
    rng = random.Random(11)
    tb = random_treebank(77, 60)
    for sent in tb.sentences:
        once = strip_attachments(sent, CFG)
        twice = strip_attachments(once, CFG)
        assert once == twice


def test_full_and_stripped_agree_without_attachments(tmp_path):
    tb = parse_bracketed("\n".join([
        "(NP der/ART Mann/NN)",
        "(NP (AP alte/ADJA) Leute/NN)",
        "er/PPER kam/VVFIN",
    ]))
    full = train(tb, ChunkerConfig(attachment="full"))
    stripped = train(tb, ChunkerConfig(attachment="stripped"))
    pa, pb = tmp_path / "a", tmp_path / "b"
    save_model(full, str(pa))
    save_model(stripped, str(pb))
    assert pa.read_bytes() == pb.read_bytes()


# -- standalone mode ----------------------------------------------------------

def test_standalone_recovers_training_structure():
    tb = small_treebank()
    model = train(tb, ChunkerConfig())
    result = tag_standalone(
        model,
        [("ein", "ART"), ("in", "APPR"), ("Tel", "NE"), ("Aviv", "NE"),
         ("lebender", "ADJA"), ("Maler", "NN")],
    )
    assert serialize_sentence(result.sentence) == SAMPLE_NP.replace("ein/ART", "ein/ART")
    assert result.repairs == 0


def test_standalone_all_outside_model():
    tb = parse_bracketed("a/X b/Y\nc/X d/Y\n")
    model = train(tb, ChunkerConfig())
    result = tag_standalone(model, [("m", "X"), ("n", "Y")])
    assert all(isinstance(i, Token) for i in result.sentence.forest)
    assert all(t.r == ONE for t in result.tags)


def test_standalone_unknown_pos_flagged():
    model = train(small_treebank(), ChunkerConfig())
    result = tag_standalone(model, [("der", "ART"), ("blip", "XYZ")])
    assert result.unknown_pos == (1,)
    assert len(result.sentence.tokens) == 2


# -- interactive mode ----------------------------------------------------------

def test_interactive_recovers_sample_structure():
    tb = small_treebank()
    model = train(tb, ChunkerConfig(mode="interactive"))
    result = tag_interactive(
        model,
        [("ein", "ART"), ("in", "APPR"), ("Tel", "NE"), ("Aviv", "NE"),
         ("lebender", "ADJA"), ("Maler", "NN")],
        BoundarySpec(((0, 6),)),
    )
    assert serialize_sentence(result.sentence) == SAMPLE_NP


def test_interactive_single_token_span():
    model = train(small_treebank(), ChunkerConfig())
    result = tag_interactive(model, [("Mann", "NN")], BoundarySpec(((0, 1),)))
    forest = result.sentence.forest
    assert len(forest) == 1
    assert not isinstance(forest[0], Token)


def test_interactive_no_spans_gives_bare_forest():
    model = train(small_treebank(), ChunkerConfig())
    result = tag_interactive(
        model, [("der", "ART"), ("Mann", "NN")], BoundarySpec(())
    )
    assert all(isinstance(i, Token) for i in result.sentence.forest)


def test_interactive_boundaries_always_respected():
    tb = annotation_corpus(5, 150)
    model = train(tb, ChunkerConfig(mode="interactive"))
    rng = random.Random(17)
    pos_pool = sorted(tb.pos_alphabet)
    for _ in range(50):
        n = rng.randint(1, 12)
        words = [("w%d" % i, rng.choice(pos_pool)) for i in range(n)]
        spans = []
        i = 0
        while i < n:
            if rng.random() < 0.5:
                j = min(n, i + rng.randint(1, 4))
                spans.append((i, j))
                i = j
            else:
                i += 1
        boundaries = BoundarySpec(tuple(spans))
        result = tag_interactive(model, words, boundaries)
        got = _top_spans(result.sentence)
        assert got == list(boundaries.spans)


def _top_spans(sentence):
    spans = []
    pos = 0
    for item in sentence.forest:
        if isinstance(item, Token):
            pos += 1
        else:
            width = len(list(_yield(item)))
            spans.append((pos, pos + width))
            pos += width
    return spans


def _yield(item):
    if isinstance(item, Token):
        yield item
    else:
        for c in item.children:
            yield from _yield(c)


def test_overlapping_spans_rejected():
    with pytest.raises(ValueError):
        BoundarySpec(((0, 3), (2, 5)))
    with pytest.raises(ValueError):
        BoundarySpec(((2, 2),))


def test_span_out_of_range_rejected():
    model = train(small_treebank(), ChunkerConfig())
    with pytest.raises(ValueError):
        tag_interactive(model, [("a", "ART")], BoundarySpec(((0, 2),)))


def test_infeasible_span_falls_back_to_flat_chunk():
    # model trained on bare tokens only: no non-ONE tag exists at all
    tb = parse_bracketed("a/X b/Y\nc/X d/Y\n")
    model = train(tb, ChunkerConfig())
    result = tag_interactive(
        model, [("m", "X"), ("n", "Y")], BoundarySpec(((0, 2),))
    )
    assert result.infeasible_spans == ((0, 2),)
    assert _top_spans(result.sentence) == [(0, 2)]
