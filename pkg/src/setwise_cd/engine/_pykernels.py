"""Pure-python simulation kernels.

These mirror the compiled kernels in ``_ckernels.pyx`` operation for
operation (same loop order, same accumulation order, same RNG), so a run is
bit-identical regardless of which backend executed it. Keep the two files in
sync when changing either.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0


def count_records(iterations: int, record_every: int) -> int:
    extra = 1 if iterations % record_every else 0
    return iterations // record_every + extra


def _alloc(n_rec):
    return (
        np.zeros(n_rec, dtype=np.int64),
        np.zeros(n_rec, dtype=np.int32),
        np.zeros(n_rec, dtype=np.int32),
        np.zeros(n_rec, dtype=np.float64),
        np.zeros(n_rec, dtype=np.float64),
    )


def run_consensus(
    lam,
    z,
    qinv,
    bvec,
    c0,
    f_star,
    edge_u,
    edge_v,
    indptr,
    indices,
    use_gs,
    eta,
    iterations,
    seed,
    record_every,
    drift_every,
    drift_tol,
):
    n, d = z.shape
    num_edges = lam.shape[0]
    lam_l = [[float(x) for x in row] for row in lam]
    z_l = [[float(x) for x in row] for row in z]
    qinv_l = [[[float(x) for x in r] for r in m] for m in qinv]
    b_l = [[float(x) for x in row] for row in bvec]
    c0_l = [float(x) for x in c0]
    eu = [int(x) for x in edge_u]
    ev = [int(x) for x in edge_v]
    sets = [
        [int(indices[t]) for t in range(int(indptr[i]), int(indptr[i + 1]))]
        for i in range(n)
    ]

    state = int(seed) & _MASK

    def next_u64():
        nonlocal state
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        w = state
        w = ((w ^ (w >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        w = ((w ^ (w >> 27)) * 0x94D049BB133111EB) & _MASK
        return w ^ (w >> 31)

    def bounded(m):
        k = int(((next_u64() >> 11) * _INV_2_53) * m)
        return m - 1 if k >= m else k

    def cgrad(i, out):
        zi = z_l[i]
        bi = b_l[i]
        qi = qinv_l[i]
        for r in range(d):
            acc = 0.0
            row = qi[r]
            for c in range(d):
                acc += row[c] * (zi[c] - bi[c])
            out[r] = acc

    def value():
        acc = 0.0
        for i in range(n):
            zi = z_l[i]
            bi = b_l[i]
            qi = qinv_l[i]
            quad = 0.0
            for r in range(d):
                inner = 0.0
                row = qi[r]
                for c in range(d):
                    inner += row[c] * (zi[c] - bi[c])
                quad += (zi[r] - bi[r]) * inner
            acc += 0.5 * quad - c0_l[i]
        return acc

    n_rec = count_records(iterations, record_every)
    rec_iter, rec_node, rec_edge, rec_gradsq, rec_subopt = _alloc(n_rec)
    bu = [0.0] * d
    bv = [0.0] * d
    messages = 0
    resyncs = 0
    r_idx = 0

    for k in range(1, iterations + 1):
        i = bounded(n)
        s_i = sets[i]
        if use_gs:
            best = -1.0
            ell = -1
            for cand in s_i:
                cgrad(eu[cand], bu)
                cgrad(ev[cand], bv)
                gs = 0.0
                for t in range(d):
                    gt = bu[t] - bv[t]
                    gs += gt * gt
                if gs > best:
                    best = gs
                    ell = cand
            messages += len(s_i) + 1
        else:
            ell = s_i[bounded(len(s_i))]
            messages += 2

        u = eu[ell]
        v = ev[ell]
        cgrad(u, bu)
        cgrad(v, bv)
        gradsq = 0.0
        for t in range(d):
            gt = bu[t] - bv[t]
            gradsq += gt * gt
        lam_row = lam_l[ell]
        zu = z_l[u]
        zv = z_l[v]
        for t in range(d):
            delta = -eta * (bu[t] - bv[t])
            lam_row[t] += delta
            zu[t] += delta
            zv[t] -= delta

        if drift_every > 0 and k % drift_every == 0:
            zr = [[0.0] * d for _ in range(n)]
            for m in range(num_edges):
                lm = lam_l[m]
                zru = zr[eu[m]]
                zrv = zr[ev[m]]
                for t in range(d):
                    zru[t] += lm[t]
                    zrv[t] -= lm[t]
            maxd = 0.0
            for i2 in range(n):
                for t in range(d):
                    dv = z_l[i2][t] - zr[i2][t]
                    if dv < 0.0:
                        dv = -dv
                    if dv > maxd:
                        maxd = dv
            if maxd > drift_tol:
                z_l = zr
                resyncs += 1

        if k % record_every == 0 or k == iterations:
            rec_iter[r_idx] = k
            rec_node[r_idx] = i
            rec_edge[r_idx] = ell
            rec_gradsq[r_idx] = gradsq
            rec_subopt[r_idx] = value() - f_star
            r_idx += 1

    lam[:, :] = np.asarray(lam_l)
    z[:, :] = np.asarray(z_l)
    return rec_iter, rec_node, rec_edge, rec_gradsq, rec_subopt, messages, resyncs


def run_separable(
    x,
    diag,
    indptr,
    indices,
    use_gs,
    eta,
    iterations,
    seed,
    record_every,
):
    n = len(indptr) - 1
    num_coords = x.shape[0]
    x_l = [float(v) for v in x]
    d_l = [float(v) for v in diag]
    sets = [
        [int(indices[t]) for t in range(int(indptr[i]), int(indptr[i + 1]))]
        for i in range(n)
    ]

    state = int(seed) & _MASK

    def next_u64():
        nonlocal state
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        w = state
        w = ((w ^ (w >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        w = ((w ^ (w >> 27)) * 0x94D049BB133111EB) & _MASK
        return w ^ (w >> 31)

    def bounded(m):
        k = int(((next_u64() >> 11) * _INV_2_53) * m)
        return m - 1 if k >= m else k

    def value():
        acc = 0.0
        for m in range(num_coords):
            acc += d_l[m] * x_l[m] * x_l[m]
        return acc

    n_rec = count_records(iterations, record_every)
    rec_iter, rec_node, rec_edge, rec_gradsq, rec_subopt = _alloc(n_rec)
    messages = 0
    r_idx = 0

    for k in range(1, iterations + 1):
        i = bounded(n)
        s_i = sets[i]
        if use_gs:
            best = -1.0
            ell = -1
            for cand in s_i:
                g = 2.0 * d_l[cand] * x_l[cand]
                gs = g * g
                if gs > best:
                    best = gs
                    ell = cand
            messages += len(s_i) + 1
        else:
            ell = s_i[bounded(len(s_i))]
            messages += 2

        g = 2.0 * d_l[ell] * x_l[ell]
        gradsq = g * g
        x_l[ell] -= eta * g

        if k % record_every == 0 or k == iterations:
            rec_iter[r_idx] = k
            rec_node[r_idx] = i
            rec_edge[r_idx] = ell
            rec_gradsq[r_idx] = gradsq
            rec_subopt[r_idx] = value()
            r_idx += 1

    x[:] = np.asarray(x_l)
    return rec_iter, rec_node, rec_edge, rec_gradsq, rec_subopt, messages, 0
