#!/usr/bin/env python3
"""Benchmark: compiled Viterbi kernel vs the pure-Python fallback.

Builds one model from a synthetic corpus, then times decoding of random
POS sequences at several lengths through both kernels in the same process.

    python3 benchmarks/bench_viterbi.py --lengths 20,100,500,1000
"""

import argparse
import random
import statistics
import time

from chunktagger import _viterbi_py
from chunktagger.chunker import ChunkerConfig, train
from chunktagger.encoding import EncodingScheme
from chunktagger.model import _allowed_for_position
from chunktagger.synthesis import annotation_corpus

try:
    from chunktagger import _viterbi as _compiled
except ImportError:
    _compiled = None


def decode_inputs(model, pos_seq):
    allowed, emis = [], []
    for i, pos in enumerate(pos_seq):
        ids, logs, _ = _allowed_for_position(model, i, pos, "unk")
        allowed.append(ids)
        emis.append(logs)
    return allowed, emis


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sentences", type=int, default=800)
    ap.add_argument("--lengths", default="20,100,500,1000")
    ap.add_argument("--repeats", type=int, default=9)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    corpus = annotation_corpus(args.seed, args.sentences)
    model = train(corpus, ChunkerConfig(scheme=EncodingScheme(dims="rtc")))
    print(
        "model: %d tags, %d POS symbols, trained on %d sentences"
        % (len(model.alphabet), len(model.pos_alphabet), args.sentences)
    )
    if _compiled is None:
        print("compiled kernel not available; timing pure kernel only")

    rng = random.Random(args.seed + 1)
    pool = sorted(model.pos_alphabet)
    pure_tables = _viterbi_py.build_tables(model)
    comp_tables = _compiled.build_tables(model) if _compiled else None

    header = "%8s  %12s  %12s  %8s" % ("length", "pure (ms)", "compiled (ms)", "speedup")
    print(header)
    print("-" * len(header))
    for length in (int(x) for x in args.lengths.split(",")):
        pos_seq = [rng.choice(pool) for _ in range(length)]
        allowed, emis = decode_inputs(model, pos_seq)
        t_pure, _ = best_of(lambda: _viterbi_py.viterbi_path(pure_tables, allowed, emis),
                            args.repeats)
        if comp_tables is not None:
            t_comp, _ = best_of(lambda: _compiled.viterbi_path(comp_tables, allowed, emis),
                                args.repeats)
            print("%8d  %12.3f  %12.3f  %7.1fx"
                  % (length, t_pure * 1e3, t_comp * 1e3, t_pure / t_comp))
        else:
            print("%8d  %12.3f  %12s  %8s" % (length, t_pure * 1e3, "-", "-"))

    if comp_tables is not None:
        # sanity: identical output on the last sequence
        p_path, p_score = _viterbi_py.viterbi_path(pure_tables, allowed, emis)
        c_path, c_score = _compiled.viterbi_path(comp_tables, allowed, emis)
        assert list(p_path) == list(c_path) and abs(p_score - c_score) < 1e-9
        print("outputs identical across kernels")


if __name__ == "__main__":
    main()
