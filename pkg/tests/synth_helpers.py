"""Shared test helpers: random models and the brute-force Viterbi oracle."""

import itertools
import math
import random

from chunktagger.encoding import RELATIONS, EncodingScheme, StructuralTag
from chunktagger.model import (
    ChunkModel,
    counts_from_tag_sequences,
    deleted_interpolation_weights,
    emission_prob,
    transition_prob,
)
from chunktagger.model import BOS, EOS

NEG_INF = float("-inf")


def random_tag_model(rng: random.Random, n_tags: int, n_pos: int,
                     degenerate: bool = True, order: int = 3) -> ChunkModel:
    """A model trained on random tag sequences over a random alphabet."""
    pos_pool = ["P%d" % i for i in range(n_pos)]
    tags = []
    for i in range(n_tags):
        r = RELATIONS[i % len(RELATIONS)]
        if degenerate:
            tags.append(StructuralTag(r, pos_pool[i % n_pos], "C%d" % (i // 2), None))
        else:
            tags.append(StructuralTag(r, None, "C%d" % i, None))
    tags = list(dict.fromkeys(tags))
    scheme = EncodingScheme(dims="rtc" if degenerate else "rc")

    sequences = []
    for _ in range(rng.randint(20, 40)):
        length = rng.randint(1, 10)
        seq = [tags[rng.randrange(len(tags))] for _ in range(length)]
        if degenerate:
            pos_seq = [t.t for t in seq]
        else:
            pos_seq = [rng.choice(pos_pool) for _ in seq]
        sequences.append((seq, pos_seq))
    # every tag must occur at least once (model invariant)
    all_tags = list(tags)
    sequences.append(
        (all_tags,
         [t.t for t in all_tags] if degenerate
         else [rng.choice(pos_pool) for _ in all_tags])
    )
    counts = counts_from_tag_sequences(sequences)
    weights = deleted_interpolation_weights(counts)
    return ChunkModel(scheme, counts, weights, order=order)


def oracle_allowed(model: ChunkModel, pos: str, constraint=None):
    """Tag candidates in alphabet order, mirroring the decoder's pruning."""
    tags = list(model.alphabet)
    if model.scheme.has_t and pos in model.pos_alphabet:
        tags = [t for t in tags if t.t == pos]
    if constraint is not None:
        allowed = set(constraint)
        tags = [t for t in tags if t in allowed]
    return tags


def oracle_decode(model: ChunkModel, pos_seq, constraints=None):
    """Exhaustive enumeration argmax using only the public probability
    functions; returns (best sequence, best log score)."""
    candidate_sets = []
    for i, pos in enumerate(pos_seq):
        c = constraints[i] if constraints is not None else None
        candidate_sets.append(oracle_allowed(model, pos, c))
    best_seq, best_score = None, NEG_INF
    for seq in itertools.product(*candidate_sets):
        score = 0.0
        hist = (BOS, BOS)
        dead = False
        for pos, tag in zip(pos_seq, seq):
            pt = transition_prob(model, hist[0], hist[1], tag)
            pe = emission_prob(model, tag, pos)
            if pt <= 0.0 or pe <= 0.0:
                dead = True
                break
            score += math.log(pt) + math.log(pe)
            hist = (hist[1], tag)
        if dead:
            continue
        pe_end = transition_prob(model, hist[0], hist[1], EOS)
        if pe_end <= 0.0:
            continue
        score += math.log(pe_end)
        if score > best_score:
            best_seq, best_score = seq, score
    return best_seq, best_score
