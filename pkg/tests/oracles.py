"""Brute-force references that share no code with the package.

Cliques are kept as frozensets in arbitrary order; since every history is
equally likely, averages over all histories do not depend on that order.
"""

from collections import deque
from fractions import Fraction
from itertools import combinations


def all_histories(k, n):
    """Yield the edge list of every history with ``n`` added vertices."""

    def rec(cliques, edges, v, left):
        if left == 0:
            yield edges
            return
        for c in cliques:
            new = [frozenset(c - {x} | {v}) for x in c]
            yield from rec(cliques + new, edges + [(u, v) for u in c], v + 1, left - 1)

    root = frozenset(range(1, k + 1))
    yield from rec([root], list(combinations(range(1, k + 1), 2)), k + 1, n)


def bfs(num_vertices, edges, source):
    adj = {v: [] for v in range(1, num_vertices + 1)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def profile_from_edges(k, n, edges):
    """``{(d, j): count}`` of added vertices at distance ``d`` from ``{1..j}``."""
    nv = k + n
    per_root = [bfs(nv, edges, r) for r in range(1, k + 1)]
    out = {}
    for v in range(k + 1, nv + 1):
        best = None
        for j in range(1, k + 1):
            dv = per_root[j - 1][v]
            best = dv if best is None else min(best, dv)
            out[(best, j)] = out.get((best, j), 0) + 1
    return out


def mean_profile(k, n):
    """Exact ``E X[d, j]`` by averaging over all histories."""
    total = {}
    count = 0
    for edges in all_histories(k, n):
        count += 1
        for key, val in profile_from_edges(k, n, edges).items():
            total[key] = total.get(key, 0) + val
    return {key: Fraction(val, count) for key, val in total.items()}, count


def root_degree_law(k, n):
    """Exact law of the number of added neighbours of vertex 1."""
    law = {}
    count = 0
    for edges in all_histories(k, n):
        count += 1
        ell = sum(1 for u, v in edges if u == 1 and v > k)
        law[ell] = law.get(ell, 0) + 1
    return {ell: Fraction(c, count) for ell, c in sorted(law.items())}
