"""Acceptance suite: one test per criterion, fixed seeds, pinned tolerances.

Quantitative checks run on seeded synthetic corpora; the structural checks
are property-based.  Each test prints a PASS/FAIL line via conftest.
"""

import math
import random
import time

from chunktagger.corpus import Treebank, parse_bracketed
from chunktagger.chunker import (
    BoundarySpec,
    ChunkerConfig,
    tag_interactive,
    train,
)
from chunktagger.encoding import (
    RELATIONS,
    EncodingScheme,
    StructuralTag,
    decode_tags,
    encode_sentence,
    tag_alphabet,
)
from chunktagger.evaluation import _eval_split, learning_curve
from chunktagger.model import (
    BOS,
    EOS,
    ChunkModel,
    CountsTable,
    counts_from_tag_sequences,
    deleted_interpolation_weights,
    emission_prob,
    transition_prob,
    viterbi_decode,
    viterbi_score,
)
from chunktagger.synthesis import (
    annotation_corpus,
    pp_attachment_corpus,
    random_sentence,
    random_treebank,
    sample_trigram_tag_corpus,
)

from synth_helpers import random_tag_model

SAMPLE_NP = "(NP ein/ART (AP (PP in/APPR (MPN Tel/NE Aviv/NE)) lebender/ADJA) Maler/NN)"

NEG_INF = float("-inf")


def _split(tb: Treebank, seed: int):
    order = list(tb.sentences)
    random.Random(seed).shuffle(order)
    cut = len(order) - len(order) // 10
    mk = lambda ss: Treebank(tb.pos_alphabet, tb.category_alphabet, tuple(ss))
    return mk(order[:cut]), mk(order[cut:])


# 1. Round-trip codec ------------------------------------------------------

def test_roundtrip_codec_10000_sentences_under_10s():
    started = time.perf_counter()
    cases = (
        (3, EncodingScheme(dims="rtcg", depth=3), 10000, 101),
        (2, EncodingScheme(dims="rtc", depth=2), 10000, 202),
    )
    for depth, scheme, count, seed in cases:
        rng = random.Random(seed)
        for _ in range(count):
            sentence = random_sentence(rng, depth=depth)
            tags = encode_sentence(sentence, scheme)
            result = decode_tags(sentence.tokens, tags, scheme)
            assert result.repairs == 0
            assert result.sentence == sentence
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, "round-trip took %.2fs" % elapsed


# 2. Reference tags for the worked six-token example ------------------------

def test_reference_example_tags():
    sent = parse_bracketed(SAMPLE_NP).sentences[0]
    rtc = encode_sentence(sent, EncodingScheme(dims="rtc"))
    assert rtc[4] == StructuralTag("++", "ADJA", "AP", None)
    rtcg = encode_sentence(sent, EncodingScheme(dims="rtcg"))
    assert rtcg[3] == StructuralTag("0", "NE", "MPN", "N")


# 3. Tagset bound and monotone ladder ---------------------------------------

def test_tagset_bound_and_dims_ladder():
    scheme_r = EncodingScheme(dims="r")
    for seed in range(5):
        tb = random_treebank(300 + seed, 150)
        assert len(tag_alphabet(tb, scheme_r).tags) <= 7
    full = parse_bracketed(
        "\n".join([SAMPLE_NP, "(NP (ART ein/ART) (NN Maler/NN))", "a/X b/Y"])
    )
    inv = tag_alphabet(full, scheme_r)
    assert len(inv.tags) == 7
    assert {t.r for t in inv.tags} == set(RELATIONS)

    tb = random_treebank(42, 200)
    sizes = [
        len(tag_alphabet(tb, EncodingScheme(dims=d)).tags)
        for d in ("r", "rt", "rtc", "rtcg")
    ]
    assert sizes == sorted(sizes)


# 4. Viterbi exactness -------------------------------------------------------

def _oracle_best(model, pos_seq, allowed_sets):
    """Prefix-sharing exhaustive enumeration over allowed tag sets using
    only the public probability functions."""
    memo = {}

    def trans(h2, h1, t):
        key = (h2, h1, t)
        p = memo.get(key)
        if p is None:
            p = transition_prob(model, h2, h1, t)
            memo[key] = p
        return p

    best = [NEG_INF, None, False]  # score, sequence, tie_seen
    seq = []

    def dfs(i, h2, h1, acc):
        if i == len(pos_seq):
            p = trans(h2, h1, EOS)
            if p <= 0.0:
                return
            total = acc + math.log(p)
            if total > best[0]:
                if total - best[0] <= 1e-7:
                    best[2] = True
                best[0], best[1] = total, tuple(seq)
            elif best[0] - total <= 1e-7 and tuple(seq) != best[1]:
                best[2] = True
            return
        for tag in allowed_sets[i]:
            pt = trans(h2, h1, tag)
            if pt <= 0.0:
                continue
            pe = emission_prob(model, tag, pos_seq[i])
            if pe <= 0.0:
                continue
            seq.append(tag)
            dfs(i + 1, h1, tag, acc + math.log(pt) + math.log(pe))
            seq.pop()

    dfs(0, BOS, BOS, 0.0)
    return best[0], best[1], best[2]


def test_viterbi_exactness_200_models_all_sequences_len5():
    rng = random.Random(4242)
    checked = 0
    for trial in range(200):
        degenerate = trial % 2 == 0
        n_tags = rng.randint(3, 12 if degenerate else 7)
        model = random_tag_model(rng, n_tags, 2, degenerate=degenerate)
        pos_pool = sorted(model.pos_alphabet)
        allowed_by_pos = {}
        for pos in pos_pool:
            tags = list(model.alphabet)
            if model.scheme.has_t:
                tags = [t for t in tags if t.t == pos]
            allowed_by_pos[pos] = tags

        def all_seqs(n):
            if n == 0:
                yield []
                return
            for prefix in all_seqs(n - 1):
                for pos in pos_pool:
                    yield prefix + [pos]

        for n in range(1, 6):
            for pos_seq in all_seqs(n):
                got = viterbi_decode(model, pos_seq)
                got_score = viterbi_score(model, pos_seq, got)
                want_score, want_seq, tie = _oracle_best(
                    model, pos_seq, [allowed_by_pos[p] for p in pos_seq]
                )
                assert abs(got_score - want_score) <= 1e-9, (
                    "model %d, %r: %r vs %r" % (trial, pos_seq, got_score, want_score)
                )
                if not tie:
                    assert tuple(got) == want_seq
                checked += 1
    assert checked > 200 * 60


# 5. Deleted interpolation ---------------------------------------------------

def test_interpolation_normalization_and_hand_values():
    rng = random.Random(11)
    for _ in range(50):
        counts = CountsTable()
        for _s in range(rng.randint(1, 25)):
            counts.add_sequence([rng.randrange(6) for _ in range(rng.randint(1, 12))])
        w = deleted_interpolation_weights(counts)
        assert abs(w.l1 + w.l2 + w.l3 - 1.0) <= 1e-9

    # five identical tags: lambda = (5/6, 0, 1/6), computed by hand
    counts_a = CountsTable()
    counts_a.add_sequence([0, 0, 0, 0, 0])
    w = deleted_interpolation_weights(counts_a)
    assert abs(w.l1 - 5 / 6) <= 1e-12
    assert abs(w.l2 - 0.0) <= 1e-12
    assert abs(w.l3 - 1 / 6) <= 1e-12
    # alternating tags: lambda = (1/6, 1/3, 1/2), computed by hand
    counts_b = CountsTable()
    counts_b.add_sequence([0, 1, 0, 1, 0])
    w = deleted_interpolation_weights(counts_b)
    assert abs(w.l1 - 1 / 6) <= 1e-12
    assert abs(w.l2 - 1 / 3) <= 1e-12
    assert abs(w.l3 - 1 / 2) <= 1e-12


# 6. Transition normalization ------------------------------------------------

def test_transition_normalization_1000_random_histories():
    rng = random.Random(21)
    models = [random_tag_model(rng, rng.randint(4, 10), 2) for _ in range(5)]
    for model in models:
        outcomes = list(model.alphabet) + [EOS]
        pool = list(model.alphabet) + [BOS]
        for _ in range(200):
            h2, h1 = rng.choice(pool), rng.choice(pool)
            total = sum(transition_prob(model, h2, h1, s) for s in outcomes)
            assert abs(total - 1.0) <= 1e-9


# 7. Model-order monotonicity -------------------------------------------------

def test_order_monotonicity_on_trigram_source():
    tags, poss, _alphabet = sample_trigram_tag_corpus(1234, 2000)
    split = 1800
    counts = counts_from_tag_sequences(list(zip(tags[:split], poss[:split])))
    weights = deleted_interpolation_weights(counts)
    accuracy = {}
    for order in (1, 2, 3):
        model = ChunkModel(EncodingScheme(dims="rt"), counts, weights, order=order)
        correct = total = 0
        for gold, pos_seq in zip(tags[split:], poss[split:]):
            pred = viterbi_decode(model, pos_seq)
            correct += sum(1 for a, b in zip(gold, pred) if a == b)
            total += len(gold)
        accuracy[order] = correct / total
    assert accuracy[1] < accuracy[2]
    assert accuracy[2] <= accuracy[3] + 0.005
    assert accuracy[3] - accuracy[2] < accuracy[2] - accuracy[1]


# 8. Interactive >= standalone -------------------------------------------------

def test_interactive_beats_standalone():
    tb = annotation_corpus(2026, 1500)
    train_tb, test_tb = _split(tb, 13)
    results = {}
    for mode in ("interactive", "standalone"):
        config = ChunkerConfig(scheme=EncodingScheme(dims="rtc"), mode=mode)
        results[mode] = _eval_split(train_tb, test_tb, config)
    assert (
        results["interactive"].labelled_bracketing_precision
        >= results["standalone"].labelled_bracketing_precision
    )


# 9. Stripping gain -------------------------------------------------------------

def test_stripping_gain_on_ambiguous_postnominal_pps():
    tb = pp_attachment_corpus(2026, 1200)
    train_tb, test_tb = _split(tb, 17)
    results = {}
    for attachment in ("full", "stripped"):
        config = ChunkerConfig(
            scheme=EncodingScheme(dims="rtc"), mode="standalone", attachment=attachment
        )
        results[attachment] = _eval_split(train_tb, test_tb, config)
    gain = results["stripped"].tag_accuracy - results["full"].tag_accuracy
    assert gain > 0.01, "stripping gain %.4f" % gain


# 10. Learning-curve shape -------------------------------------------------------

def test_learning_curve_shape_and_depth2_dominance():
    tb = annotation_corpus(2026, 2300)
    sizes = [200, 500, 1000, 2000]
    curves = {}
    for depth in (3, 2):
        config = ChunkerConfig(
            scheme=EncodingScheme(dims="rtc", depth=depth), mode="interactive"
        )
        curves[depth] = learning_curve(tb, config, sizes, seed=11)
    assert curves[3][2000] - curves[3][200] >= 0.05
    for size in sizes:
        assert curves[2][size] >= curves[3][size]


# 11. Linear-time decoding --------------------------------------------------------

def test_decode_time_linear_in_length():
    tb = annotation_corpus(7, 400)
    model = train(tb, ChunkerConfig(scheme=EncodingScheme(dims="rtc")))
    rng = random.Random(3)
    pool = sorted(model.pos_alphabet)
    # the short case is a prefix of the long one, so both sequences have
    # comparable tag-ambiguity composition
    long_seq = [rng.choice(pool) for _ in range(1000)]
    short_seq = long_seq[:100]

    def timed(pos_seq, inner):
        # wall time of `inner` consecutive decodes, de-noising the short case
        t0 = time.perf_counter()
        for _ in range(inner):
            viterbi_decode(model, pos_seq)
        return (time.perf_counter() - t0) / inner

    timed(short_seq, 3)  # warm-up
    ratios = []
    for _ in range(5):
        t100 = timed(short_seq, 10)
        t1000 = timed(long_seq, 1)
        ratios.append(t1000 / t100)
    assert min(ratios) <= 12.0, "ratios %s" % ratios


# 12. Constraint correctness -------------------------------------------------------

def test_constraint_correctness_1000_random_requests():
    tb = annotation_corpus(5, 600)
    model = train(tb, ChunkerConfig(scheme=EncodingScheme(dims="rtc"), mode="interactive"))
    rng = random.Random(23)
    pool = sorted(tb.pos_alphabet)
    holds = 0
    for _ in range(1000):
        n = rng.randint(1, 14)
        words = [("w%d" % i, rng.choice(pool)) for i in range(n)]
        spans = []
        i = 0
        while i < n:
            if rng.random() < 0.55:
                j = min(n, i + rng.randint(1, 5))
                spans.append((i, j))
                i = j + rng.randint(0, 2)
            else:
                i += 1
        boundaries = BoundarySpec(tuple(spans))
        result = tag_interactive(model, words, boundaries)
        got = _top_spans(result.sentence)
        assert got == list(boundaries.spans)
        holds += 1
    assert holds == 1000


def _top_spans(sentence):
    from chunktagger.corpus import Token

    spans = []
    pos = 0
    for item in sentence.forest:
        if isinstance(item, Token):
            pos += 1
        else:
            width = len(_yield_tokens(item))
            spans.append((pos, pos + width))
            pos += width
    return spans


def _yield_tokens(item):
    from chunktagger.corpus import Token

    if isinstance(item, Token):
        return [item]
    out = []
    for child in item.children:
        out.extend(_yield_tokens(child))
    return out
