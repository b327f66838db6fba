"""Pure-Python Viterbi kernel.

Reference implementation of the DP over (previous, current) tag pairs; the
compiled kernel in _viterbi.pyx mirrors it exactly.  Probabilities are
interpolated in linear space and logged, matching transition_prob, so both
kernels and the brute-force test oracle agree to float precision.
"""

from __future__ import annotations

import math
from typing import List, Sequence, Tuple

NEG_INF = float("-inf")


class Tables:
    """Model-derived lookup tables shared by every decode call."""

    __slots__ = ("lam1", "lam2", "lam3", "p1", "has2", "brow", "trow",
                 "eos_id", "bos_id")

    def __init__(self, lam1, lam2, lam3, p1, has2, brow, trow, eos_id, bos_id):
        self.lam1 = lam1
        self.lam2 = lam2
        self.lam3 = lam3
        self.p1 = p1        # unigram probs, index 0..K (K = EOS)
        self.has2 = has2    # context id -> bool, index 0..K+1 (K+1 = BOS)
        self.brow = brow    # context id -> {outcome id: P(outcome | context)}
        self.trow = trow    # (id, id) -> {outcome id: P(outcome | pair)}
        self.eos_id = eos_id
        self.bos_id = bos_id


def build_tables(model) -> Tables:
    k = len(model.alphabet)
    eos, bos = model.eos_id, model.bos_id
    n = model._n
    p1 = [0.0] * (k + 1)
    for i, c in model._uni.items():
        p1[i] = c / n
    ctx2 = model._ctx2
    has2 = [ctx2.get(i, 0) > 0 for i in range(k + 2)]
    brow = {}
    for (a, b), c in model._bi.items():
        brow.setdefault(a, {})[b] = c / ctx2[a]
    trow = {}
    ctx3 = model._ctx3
    for (a, b, c), n3 in model._tri.items():
        trow.setdefault((a, b), {})[c] = n3 / ctx3[(a, b)]
    lam1, lam2, lam3 = model.lambdas
    return Tables(lam1, lam2, lam3, p1, has2, brow, trow, eos, bos)


def _log_trans_row(tables: Tables, x: int, y: int, outcomes: Sequence[int]) -> list:
    """log P(z | x, y) for each z in outcomes."""
    lam1, lam2, lam3 = tables.lam1, tables.lam2, tables.lam3
    p1 = tables.p1
    row2 = tables.brow.get(y) if tables.has2[y] else None
    row3 = tables.trow.get((x, y))
    wnorm = lam1
    if row2 is not None:
        wnorm += lam2
    if row3 is not None:
        wnorm += lam3
    out = []
    for z in outcomes:
        p = lam1 * p1[z]
        if row2 is not None:
            p += lam2 * row2.get(z, 0.0)
        if row3 is not None:
            p += lam3 * row3.get(z, 0.0)
        if wnorm <= 0.0:
            p = p1[z]
        else:
            p /= wnorm
        out.append(math.log(p) if p > 0.0 else NEG_INF)
    return out


def viterbi_path(
    tables: Tables,
    allowed: Sequence[Sequence[int]],
    emis: Sequence[Sequence[float]],
) -> Tuple[List[int], float]:
    """Exact best path; ties resolved toward lower ids (first seen wins)."""
    n = len(allowed)
    bos = tables.bos_id

    # state at position i = (tag id at i-1, tag id at i); at i = 0 the
    # left element is BOS.  scores[ix][iy] indexes into x_list/allowed[i].
    x_list = [bos]
    scores = [
        [t + e for t, e in zip(
            _log_trans_row(tables, bos, bos, allowed[0]), emis[0])]
    ]
    all_scores = [scores]
    all_back: List[list] = [None]
    for i in range(1, n):
        ys = allowed[i - 1]
        zs = allowed[i]
        prev = all_scores[i - 1]
        cur = [[NEG_INF] * len(zs) for _ in ys]
        bp = [[0] * len(zs) for _ in ys]
        for iy, y in enumerate(ys):
            best_for_z = [NEG_INF] * len(zs)
            best_x = [0] * len(zs)
            for ix in range(len(x_list)):
                base = prev[ix][iy]
                if base == NEG_INF:
                    continue
                trans = _log_trans_row(tables, x_list[ix], y, zs)
                for iz in range(len(zs)):
                    s = base + trans[iz]
                    if s > best_for_z[iz]:
                        best_for_z[iz] = s
                        best_x[iz] = ix
            for iz in range(len(zs)):
                cur[iy][iz] = best_for_z[iz] + emis[i][iz]
                bp[iy][iz] = best_x[iz]
        all_scores.append(cur)
        all_back.append(bp)
        x_list = ys

    # close with the EOS transition
    ys = allowed[n - 2] if n > 1 else [bos]
    zs = allowed[n - 1]
    final = all_scores[n - 1]
    best = NEG_INF
    best_iy = best_iz = 0
    for iy, y in enumerate(ys):
        for iz, z in enumerate(zs):
            if final[iy][iz] == NEG_INF:
                continue
            end = _log_trans_row(tables, y, z, [tables.eos_id])[0]
            s = final[iy][iz] + end
            if s > best:
                best = s
                best_iy, best_iz = iy, iz

    path = [0] * n
    iy, iz = best_iy, best_iz
    path[n - 1] = allowed[n - 1][iz]
    for i in range(n - 1, 0, -1):
        path[i - 1] = allowed[i - 1][iy]
        ix = all_back[i][iy][iz]
        iz = iy
        iy = ix
    return path, best
