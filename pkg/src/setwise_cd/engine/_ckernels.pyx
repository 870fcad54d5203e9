# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simulation kernels.

Must stay operation-for-operation identical to ``_pykernels.py`` (same loop
order, accumulation order and RNG) so both backends produce bit-identical
traces for the same seed.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef inline unsigned long long _next_u64(unsigned long long* state) nogil:
    state[0] = state[0] + 0x9E3779B97F4A7C15ULL
    cdef unsigned long long w = state[0]
    w = (w ^ (w >> 30)) * 0xBF58476D1CE4E5B9ULL
    w = (w ^ (w >> 27)) * 0x94D049BB133111EBULL
    return w ^ (w >> 31)


cdef inline long _bounded(unsigned long long* state, long m) nogil:
    cdef long k = <long>(((_next_u64(state) >> 11) * _INV_2_53) * m)
    if k >= m:
        k = m - 1
    return k


def count_records(long iterations, long record_every):
    cdef long extra = 1 if iterations % record_every else 0
    return iterations // record_every + extra


def run_consensus(
    double[:, ::1] lam,
    double[:, ::1] z,
    double[:, :, ::1] qinv,
    double[:, ::1] bvec,
    double[::1] c0,
    double f_star,
    int[::1] edge_u,
    int[::1] edge_v,
    int[::1] indptr,
    int[::1] indices,
    bint use_gs,
    double eta,
    long iterations,
    unsigned long long seed,
    long record_every,
    long drift_every,
    double drift_tol,
):
    cdef long n = z.shape[0]
    cdef long d = z.shape[1]
    cdef long num_edges = lam.shape[0]
    cdef long n_rec = count_records(iterations, record_every)

    it_arr = np.zeros(n_rec, dtype=np.int64)
    node_arr = np.zeros(n_rec, dtype=np.int32)
    edge_arr = np.zeros(n_rec, dtype=np.int32)
    gradsq_arr = np.zeros(n_rec, dtype=np.float64)
    subopt_arr = np.zeros(n_rec, dtype=np.float64)
    cdef long[::1] rec_iter = it_arr
    cdef int[::1] rec_node = node_arr
    cdef int[::1] rec_edge = edge_arr
    cdef double[::1] rec_gradsq = gradsq_arr
    cdef double[::1] rec_subopt = subopt_arr

    bu_arr = np.zeros(d, dtype=np.float64)
    bv_arr = np.zeros(d, dtype=np.float64)
    zr_arr = np.zeros((n, d), dtype=np.float64)
    cdef double[::1] bu = bu_arr
    cdef double[::1] bv = bv_arr
    cdef double[:, ::1] zr = zr_arr

    cdef unsigned long long state = seed
    cdef long k, i, ell, cand, u, v, t, r, c, m, i2, pos, r_idx
    cdef long messages = 0, resyncs = 0
    cdef double best, gs, gt, acc, quad, inner, gradsq, delta, maxd, dv

    r_idx = 0
    for k in range(1, iterations + 1):
        i = _bounded(&state, n)
        if use_gs:
            best = -1.0
            ell = -1
            for pos in range(indptr[i], indptr[i + 1]):
                cand = indices[pos]
                u = edge_u[cand]
                v = edge_v[cand]
                for r in range(d):
                    acc = 0.0
                    for c in range(d):
                        acc += qinv[u, r, c] * (z[u, c] - bvec[u, c])
                    bu[r] = acc
                for r in range(d):
                    acc = 0.0
                    for c in range(d):
                        acc += qinv[v, r, c] * (z[v, c] - bvec[v, c])
                    bv[r] = acc
                gs = 0.0
                for t in range(d):
                    gt = bu[t] - bv[t]
                    gs += gt * gt
                if gs > best:
                    best = gs
                    ell = cand
            messages += (indptr[i + 1] - indptr[i]) + 1
        else:
            ell = indices[indptr[i] + _bounded(&state, indptr[i + 1] - indptr[i])]
            messages += 2

        u = edge_u[ell]
        v = edge_v[ell]
        for r in range(d):
            acc = 0.0
            for c in range(d):
                acc += qinv[u, r, c] * (z[u, c] - bvec[u, c])
            bu[r] = acc
        for r in range(d):
            acc = 0.0
            for c in range(d):
                acc += qinv[v, r, c] * (z[v, c] - bvec[v, c])
            bv[r] = acc
        gradsq = 0.0
        for t in range(d):
            gt = bu[t] - bv[t]
            gradsq += gt * gt
        for t in range(d):
            delta = -eta * (bu[t] - bv[t])
            lam[ell, t] += delta
            z[u, t] += delta
            z[v, t] -= delta

        if drift_every > 0 and k % drift_every == 0:
            for i2 in range(n):
                for t in range(d):
                    zr[i2, t] = 0.0
            for m in range(num_edges):
                u = edge_u[m]
                v = edge_v[m]
                for t in range(d):
                    zr[u, t] += lam[m, t]
                    zr[v, t] -= lam[m, t]
            maxd = 0.0
            for i2 in range(n):
                for t in range(d):
                    dv = z[i2, t] - zr[i2, t]
                    if dv < 0.0:
                        dv = -dv
                    if dv > maxd:
                        maxd = dv
            if maxd > drift_tol:
                for i2 in range(n):
                    for t in range(d):
                        z[i2, t] = zr[i2, t]
                resyncs += 1

        if k % record_every == 0 or k == iterations:
            acc = 0.0
            for i2 in range(n):
                quad = 0.0
                for r in range(d):
                    inner = 0.0
                    for c in range(d):
                        inner += qinv[i2, r, c] * (z[i2, c] - bvec[i2, c])
                    quad += (z[i2, r] - bvec[i2, r]) * inner
                acc += 0.5 * quad - c0[i2]
            rec_iter[r_idx] = k
            rec_node[r_idx] = <int>i
            rec_edge[r_idx] = <int>ell
            rec_gradsq[r_idx] = gradsq
            rec_subopt[r_idx] = acc - f_star
            r_idx += 1

    return it_arr, node_arr, edge_arr, gradsq_arr, subopt_arr, messages, resyncs


def run_separable(
    double[::1] x,
    double[::1] diag,
    int[::1] indptr,
    int[::1] indices,
    bint use_gs,
    double eta,
    long iterations,
    unsigned long long seed,
    long record_every,
):
    cdef long n = indptr.shape[0] - 1
    cdef long num_coords = x.shape[0]
    cdef long n_rec = count_records(iterations, record_every)

    it_arr = np.zeros(n_rec, dtype=np.int64)
    node_arr = np.zeros(n_rec, dtype=np.int32)
    edge_arr = np.zeros(n_rec, dtype=np.int32)
    gradsq_arr = np.zeros(n_rec, dtype=np.float64)
    subopt_arr = np.zeros(n_rec, dtype=np.float64)
    cdef long[::1] rec_iter = it_arr
    cdef int[::1] rec_node = node_arr
    cdef int[::1] rec_edge = edge_arr
    cdef double[::1] rec_gradsq = gradsq_arr
    cdef double[::1] rec_subopt = subopt_arr

    cdef unsigned long long state = seed
    cdef long k, i, ell, cand, pos, m, r_idx
    cdef long messages = 0
    cdef double best, g, gs, gradsq, acc

    r_idx = 0
    for k in range(1, iterations + 1):
        i = _bounded(&state, n)
        if use_gs:
            best = -1.0
            ell = -1
            for pos in range(indptr[i], indptr[i + 1]):
                cand = indices[pos]
                g = 2.0 * diag[cand] * x[cand]
                gs = g * g
                if gs > best:
                    best = gs
                    ell = cand
            messages += (indptr[i + 1] - indptr[i]) + 1
        else:
            ell = indices[indptr[i] + _bounded(&state, indptr[i + 1] - indptr[i])]
            messages += 2

        g = 2.0 * diag[ell] * x[ell]
        gradsq = g * g
        x[ell] -= eta * g

        if k % record_every == 0 or k == iterations:
            acc = 0.0
            for m in range(num_coords):
                acc += diag[m] * x[m] * x[m]
            rec_iter[r_idx] = k
            rec_node[r_idx] = <int>i
            rec_edge[r_idx] = <int>ell
            rec_gradsq[r_idx] = gradsq
            rec_subopt[r_idx] = acc
            r_idx += 1

    return it_arr, node_arr, edge_arr, gradsq_arr, subopt_arr, messages, 0
