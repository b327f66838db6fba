"""The compiled and pure Viterbi kernels must agree exactly."""

import random

import pytest

import chunktagger._kernel as kernel
from chunktagger import _viterbi_py
from chunktagger.model import viterbi_score

from synth_helpers import random_tag_model

compiled = pytest.mark.skipif(
    kernel.BACKEND != "compiled", reason="compiled kernel not built"
)


@compiled
def test_backends_agree_on_random_models():
    rng = random.Random(2024)
    for trial in range(12):
        model = random_tag_model(rng, rng.randint(3, 10), rng.randint(1, 3),
                                 degenerate=bool(trial % 2))
        pure_tables = ("pure", _viterbi_py.build_tables(model))
        pos_pool = sorted(model.pos_alphabet)
        for _ in range(5):
            n = rng.randint(1, 30)
            pos_seq = [rng.choice(pos_pool) for _ in range(n)]
            allowed = []
            emis = []
            from chunktagger.model import _allowed_for_position
            for i, p in enumerate(pos_seq):
                ids, logs, _ = _allowed_for_position(model, i, p, "unk")
                allowed.append(ids)
                emis.append(logs)
            path_c, score_c = kernel.viterbi_path(model._kernel_tables, allowed, emis)
            path_p, score_p = kernel.viterbi_path(pure_tables, allowed, emis)
            assert list(path_c) == list(path_p)
            assert score_c == pytest.approx(score_p, abs=1e-12)


@compiled
def test_scores_match_reference_scorer():
    rng = random.Random(7)
    model = random_tag_model(rng, 6, 2)
    pos_pool = sorted(model.pos_alphabet)
    for _ in range(10):
        pos_seq = [rng.choice(pos_pool) for _ in range(rng.randint(1, 12))]
        from chunktagger.model import viterbi_decode
        tags = viterbi_decode(model, pos_seq)
        from chunktagger.model import _allowed_for_position
        allowed, emis = [], []
        for i, p in enumerate(pos_seq):
            ids, logs, _ = _allowed_for_position(model, i, p, "unk")
            allowed.append(ids)
            emis.append(logs)
        _path, kernel_score = kernel.viterbi_path(model._kernel_tables, allowed, emis)
        assert kernel_score == pytest.approx(viterbi_score(model, pos_seq, tags), abs=1e-9)
