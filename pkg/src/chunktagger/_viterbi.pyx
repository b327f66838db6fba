# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Viterbi kernel.

Mirrors _viterbi_py.viterbi_path step for step: same interpolation
formula, same floating-point operation order, same tie-breaking (lower
ids win), so both backends return identical paths and scores.
"""

from libc.math cimport log

import numpy as np

NEG_INF = float("-inf")


def build_tables(model):
    cdef Py_ssize_t k = len(model.alphabet)
    n = float(model._n)
    p1 = np.zeros(k + 1, dtype=np.float64)
    for i, c in model._uni.items():
        p1[i] = c / n
    has2 = np.zeros(k + 2, dtype=np.uint8)
    ctx2 = model._ctx2
    for i, c in ctx2.items():
        if c > 0:
            has2[i] = 1
    bmat = np.zeros((k + 2, k + 1), dtype=np.float64)
    for (a, b), c in model._bi.items():
        bmat[a, b] = c / ctx2[a]
    ctx3 = model._ctx3
    rows = {}
    for (a, b, c), n3 in model._tri.items():
        rows.setdefault((a, b), []).append((c, n3 / ctx3[(a, b)]))
    tri = {}
    for key, pairs in rows.items():
        pairs.sort()
        tri[key] = (
            np.array([p[0] for p in pairs], dtype=np.int64),
            np.array([p[1] for p in pairs], dtype=np.float64),
        )
    lam1, lam2, lam3 = model.lambdas
    return (lam1, lam2, lam3, p1, has2, bmat, tri, model.eos_id, model.bos_id)


def viterbi_path(data, allowed, emis):
    lam1_o, lam2_o, lam3_o, p1_o, has2_o, bmat_o, tri, eos_o, bos_o = data
    cdef double lam1 = lam1_o
    cdef double lam2 = lam2_o
    cdef double lam3 = lam3_o
    cdef double[::1] p1 = p1_o
    cdef unsigned char[::1] has2 = has2_o
    cdef double[:, ::1] bmat = bmat_o
    cdef Py_ssize_t eos_id = eos_o
    cdef Py_ssize_t bos_id = bos_o
    cdef Py_ssize_t n = len(allowed)
    cdef Py_ssize_t k1 = p1.shape[0]

    pos_ids = [np.asarray(a, dtype=np.int64) for a in allowed]
    pos_emis = [np.asarray(e, dtype=np.float64) for e in emis]

    cdef double[::1] trow = np.zeros(k1, dtype=np.float64)
    cdef double neg_inf = NEG_INF

    cdef long[::1] zs, ys, xs
    cdef double[::1] ez
    cdef double[:, ::1] prev, cur
    cdef int[:, ::1] bp
    cdef long[::1] tri_ids
    cdef double[::1] tri_vals
    cdef Py_ssize_t i, ix, iy, iz, nx, ny, nz, j
    cdef long x, y, z
    cdef double base, wnorm, p, s
    cdef bint h2, h3

    all_scores = []
    all_back = [None]

    # position 0: history is (BOS, BOS)
    zs = pos_ids[0]
    ez = pos_emis[0]
    nz = zs.shape[0]
    first = np.empty((1, nz), dtype=np.float64)
    cur = first
    row3 = tri.get((bos_id, bos_id))
    h2 = has2[bos_id]
    h3 = row3 is not None
    if h3:
        tri_ids, tri_vals = row3
        for j in range(tri_ids.shape[0]):
            trow[tri_ids[j]] = tri_vals[j]
    wnorm = lam1
    if h2:
        wnorm += lam2
    if h3:
        wnorm += lam3
    for iz in range(nz):
        z = zs[iz]
        p = lam1 * p1[z]
        if h2:
            p += lam2 * bmat[bos_id, z]
        if h3:
            p += lam3 * trow[z]
        if wnorm <= 0.0:
            p = p1[z]
        else:
            p /= wnorm
        cur[0, iz] = (log(p) if p > 0.0 else neg_inf) + ez[iz]
    if h3:
        for j in range(tri_ids.shape[0]):
            trow[tri_ids[j]] = 0.0
    all_scores.append(first)

    x_arr = np.asarray([bos_id], dtype=np.int64)
    for i in range(1, n):
        ys = pos_ids[i - 1]
        zs = pos_ids[i]
        ez = pos_emis[i]
        xs = x_arr
        ny = ys.shape[0]
        nz = zs.shape[0]
        nx = xs.shape[0]
        prev = all_scores[i - 1]
        cur_arr = np.empty((ny, nz), dtype=np.float64)
        bp_arr = np.zeros((ny, nz), dtype=np.int32)
        cur = cur_arr
        bp = bp_arr
        for iy in range(ny):
            y = ys[iy]
            h2 = has2[y]
            for iz in range(nz):
                cur[iy, iz] = neg_inf
            for ix in range(nx):
                base = prev[ix, iy]
                if base == neg_inf:
                    continue
                x = xs[ix]
                row3 = tri.get((x, y))
                h3 = row3 is not None
                if h3:
                    tri_ids, tri_vals = row3
                    for j in range(tri_ids.shape[0]):
                        trow[tri_ids[j]] = tri_vals[j]
                wnorm = lam1
                if h2:
                    wnorm += lam2
                if h3:
                    wnorm += lam3
                for iz in range(nz):
                    z = zs[iz]
                    p = lam1 * p1[z]
                    if h2:
                        p += lam2 * bmat[y, z]
                    if h3:
                        p += lam3 * trow[z]
                    if wnorm <= 0.0:
                        p = p1[z]
                    else:
                        p /= wnorm
                    s = base + (log(p) if p > 0.0 else neg_inf)
                    if s > cur[iy, iz]:
                        cur[iy, iz] = s
                        bp[iy, iz] = <int>ix
                if h3:
                    for j in range(tri_ids.shape[0]):
                        trow[tri_ids[j]] = 0.0
        for iy in range(ny):
            for iz in range(nz):
                cur[iy, iz] = cur[iy, iz] + ez[iz]
        all_scores.append(cur_arr)
        all_back.append(bp_arr)
        x_arr = pos_ids[i - 1]

    # close with the EOS transition
    ys = pos_ids[n - 2] if n > 1 else np.asarray([bos_id], dtype=np.int64)
    zs = pos_ids[n - 1]
    ny = ys.shape[0]
    nz = zs.shape[0]
    cdef double[:, ::1] final = all_scores[n - 1]
    cdef double best = neg_inf
    cdef Py_ssize_t best_iy = 0, best_iz = 0
    for iy in range(ny):
        y = ys[iy]
        for iz in range(nz):
            if final[iy, iz] == neg_inf:
                continue
            z = zs[iz]
            h2 = has2[z]
            row3 = tri.get((y, z))
            h3 = row3 is not None
            p = lam1 * p1[eos_id]
            wnorm = lam1
            if h2:
                wnorm += lam2
                p += lam2 * bmat[z, eos_id]
            if h3:
                wnorm += lam3
                tri_ids, tri_vals = row3
                for j in range(tri_ids.shape[0]):
                    if tri_ids[j] == eos_id:
                        p += lam3 * tri_vals[j]
                        break
            if wnorm <= 0.0:
                p = p1[eos_id]
            else:
                p /= wnorm
            s = final[iy, iz] + (log(p) if p > 0.0 else neg_inf)
            if s > best:
                best = s
                best_iy = iy
                best_iz = iz

    path = [0] * n
    iy = best_iy
    iz = best_iz
    path[n - 1] = int(pos_ids[n - 1][iz])
    cdef int[:, ::1] bview
    for i in range(n - 1, 0, -1):
        path[i - 1] = int(pos_ids[i - 1][iy])
        bview = all_back[i]
        ix = bview[iy, iz]
        iz = iy
        iy = ix
    return path, best
