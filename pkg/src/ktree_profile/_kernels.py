"""Compiled inner loops. Everything here works on plain integer arrays."""

from __future__ import annotations

import math

import numba
import numpy as np

_jit = numba.njit(cache=True, nogil=True)


@_jit
def materialize_cliques(k, choices):
    """Expand the clique registry; row c holds the sorted labels of clique c."""
    n = choices.shape[0]
    cl = np.empty((n * k + 1, k), np.int64)
    for i in range(k):
        cl[0, i] = i + 1
    for s in range(n):
        v = k + 1 + s
        p = choices[s]
        base = 1 + s * k
        for t in range(k):
            drop = k - 1 - t
            c = base + t
            pos = 0
            for i in range(k):
                if i != drop:
                    cl[c, pos] = cl[p, i]
                    pos += 1
            cl[c, k - 1] = v
    return cl


@_jit
def root_distances(k, choices, cliques):
    """Distances from every vertex to each root vertex, by the attachment rule."""
    n = choices.shape[0]
    dist = np.empty((n + k, k), np.int32)
    for r in range(k):
        for i in range(k):
            dist[r, i] = 0 if r == i else 1
    for s in range(n):
        row = k + s
        c = choices[s]
        for i in range(k):
            best = dist[cliques[c, 0] - 1, i]
            for t in range(1, k):
                x = dist[cliques[c, t] - 1, i]
                if x < best:
                    best = x
            dist[row, i] = best + 1
    return dist


@_jit
def bfs(indptr, indices, source):
    """Single-source BFS on a CSR adjacency; source is a 0-based index."""
    nv = indptr.shape[0] - 1
    dist = np.full(nv, -1, np.int64)
    queue = np.empty(nv, np.int64)
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for e in range(indptr[u], indptr[u + 1]):
            w = indices[e]
            if dist[w] < 0:
                dist[w] = du
                queue[tail] = w
                tail += 1
    return dist


@_jit
def _digamma(x):
    r = 0.0
    while x < 6.0:
        r -= 1.0 / x
        x += 1.0
    f = 1.0 / (x * x)
    return r + math.log(x) - 0.5 / x - f * (1.0 / 12 - f * (1.0 / 120 - f * (1.0 / 252 - f / 240)))


@_jit
def _log_survival(i, m, b, a):
    # log prod_{t=i}^{i+m-1} (t - b) / (t + a)
    return math.lgamma(i + m - b) - math.lgamma(i - b) - math.lgamma(i + m + a) + math.lgamma(i + a)


@_jit
def root_degree_urn(k, n, rng, bernoulli_ratio=20):
    """Number of added vertices adjacent to vertex 1 after n steps.

    Vertex 1 lies in 1 + (k-1)*ell of the i*k + 1 cliques at step i, where ell
    is the current count, so only the hit times need to be sampled. Long runs of
    misses are skipped by inverting their exact survival probability, which is
    a ratio of Gamma functions. Steps whose hit probability is at least
    ``1 / bernoulli_ratio`` are drawn one at a time.
    """
    a = 1.0 / k
    ell = 0
    i = 0
    while i < n:
        hits = 1 + (k - 1) * ell
        total = i * k + 1
        if hits == total or hits * bernoulli_ratio >= total:
            if rng.random() * total < hits:
                ell += 1
            i += 1
            continue
        b = (hits - 1) / k
        logu = math.log(rng.random())
        remaining = n - i
        if _log_survival(i, remaining, b, a) > logu:
            break
        # Gamma-ratio asymptotics give the starting point, Newton polishes it.
        shift = i + (a - b - 1.0) / 2.0
        m = shift * (math.exp(-logu / (a + b)) - 1.0)
        if m < 1.0:
            m = 1.0
        if m > remaining:
            m = float(remaining)
        for _ in range(30):
            fm = _log_survival(i, m, b, a) - logu
            dfm = _digamma(i + m - b) - _digamma(i + m + a)
            step = fm / dfm
            nxt = m - step
            if nxt < 1.0:
                nxt = 1.0
            if nxt > remaining:
                nxt = float(remaining)
            if abs(nxt - m) < 1e-9 * (1.0 + m):
                m = nxt
                break
            m = nxt
        # smallest integer m with survival(m) <= u
        mi = int(math.ceil(m - 1e-7))
        if mi < 1:
            mi = 1
        if mi > remaining:
            mi = remaining
        while mi > 1 and _log_survival(i, mi - 1, b, a) <= logu:
            mi -= 1
        while mi < remaining and _log_survival(i, mi, b, a) > logu:
            mi += 1
        ell += 1
        i += mi
    return ell


@_jit
def expected_profile_float(k, n_max, d_max, keep):
    """Iterate expectations E[d, j] directly in n; snapshot rows listed in keep."""
    cur = np.zeros((d_max + 1, k + 1))
    nxt = np.zeros((d_max + 1, k + 1))
    out = np.zeros((keep.shape[0], d_max + 1, k + 1))
    slot = 0
    for n in range(n_max + 1):
        while slot < keep.shape[0] and keep[slot] == n:
            out[slot] = cur
            slot += 1
        if n == n_max:
            break
        denom = n * k + 1.0
        for d in range(1, d_max + 1):
            for j in range(1, k + 1):
                lower = cur[d - 1, k] if j == 1 else cur[d, j - 1]
                src = 1.0 if d == 1 else 0.0
                nxt[d, j] = ((k * n + k - j + 1) * cur[d, j] + j * lower + src) / denom
        cur, nxt = nxt, cur
    return out
