"""Distances from the root clique, connectivity profiles and Monte Carlo summaries.

``X[d, j]`` counts added vertices whose distance to the set of the first ``j``
root vertices ``{1, ..., j}`` equals ``d``. Root-clique vertices are not
counted, so every column sums to ``n``.
"""

from __future__ import annotations

import json
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError, ResourceGuardError
from .ktree import DEFAULT_SEED, KTree, grow_random, make_rng

MAX_CELLS = 5 * 10**9


@dataclass(frozen=True)
class DistanceTable:
    """``dist[v - 1, i - 1]`` is the graph distance from vertex v to root vertex i."""

    k: int
    dist: np.ndarray

    @property
    def added(self) -> np.ndarray:
        """Rows for the added vertices only."""
        return self.dist[self.k :]


def root_distances(tree: KTree) -> DistanceTable:
    """Distances to each root vertex via ``1 + min`` over the attachment clique.

    A new vertex only sees its attachment clique, which is already a clique,
    so no shortcut between older vertices can appear.
    """
    dist = _kernels.root_distances(tree.k, tree.choices, tree.cliques)
    return DistanceTable(tree.k, dist)


def bfs_distances(tree: KTree, source: int) -> np.ndarray:
    """BFS distances from ``source`` (1-based label); entry ``v - 1`` is vertex v."""
    if not 1 <= source <= tree.num_vertices:
        raise ConfigError(f"source {source} is not a vertex of this tree")
    indptr, indices = tree.adjacency()
    return _kernels.bfs(indptr, indices, source - 1)


def bfs_distances_reference(tree: KTree, source: int) -> list[int]:
    """Plain-Python BFS over an adjacency dict; slow, kept as a test oracle."""
    adj: dict[int, list[int]] = {v: [] for v in range(1, tree.num_vertices + 1)}
    for u, v in tree.edges():
        adj[int(u)].append(int(v))
        adj[int(v)].append(int(u))
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return [dist[v] for v in range(1, tree.num_vertices + 1)]


@dataclass(frozen=True)
class ProfileMatrix:
    """``X[d, j]`` for ``d = 0..height`` and ``j = 0..k``; row 0 and column 0 are zero."""

    k: int
    n: int
    X: np.ndarray

    def __getitem__(self, dj):
        d, j = dj
        if d >= self.X.shape[0]:
            return 0
        return int(self.X[d, j])

    @property
    def d_max(self) -> int:
        return self.X.shape[0] - 1

    def padded(self, d_max: int) -> np.ndarray:
        """Profile as a ``(d_max + 1, k + 1)`` array; levels past d_max are summed into d_max."""
        out = np.zeros((d_max + 1, self.k + 1), dtype=np.int64)
        rows = min(d_max + 1, self.X.shape[0])
        out[:rows] = self.X[:rows]
        if self.X.shape[0] > d_max + 1:
            out[d_max] += self.X[d_max + 1 :].sum(axis=0)
        return out


def connectivity_profile(tree: KTree, distances: DistanceTable | None = None) -> ProfileMatrix:
    dt = distances if distances is not None else root_distances(tree)
    k, n = tree.k, tree.n
    if n == 0:
        return ProfileMatrix(k, 0, np.zeros((1, k + 1), dtype=np.int64))
    # distance to {1..j} is the running minimum over the first j columns
    to_set = np.minimum.accumulate(dt.added, axis=1)
    depth = int(to_set.max())
    X = np.zeros((depth + 1, k + 1), dtype=np.int64)
    for j in range(1, k + 1):
        X[:, j] = np.bincount(to_set[:, j - 1], minlength=depth + 1)
    return ProfileMatrix(k, n, X)


@dataclass(frozen=True)
class TreeSummary:
    height: int
    width: int
    root_degree: int
    degree_histogram: dict[int, int]


def summary(tree: KTree, profile: ProfileMatrix | None = None) -> TreeSummary:
    """Height is the deepest nonempty level and width the fullest one, both for ``j = k``."""
    prof = profile if profile is not None else connectivity_profile(tree)
    col = prof.X[:, tree.k]
    nonzero = np.flatnonzero(col)
    height = int(nonzero[-1]) if nonzero.size else 0
    width = int(col.max()) if tree.n else 0
    values, counts = np.unique(tree.degrees(), return_counts=True)
    hist = {int(v): int(c) for v, c in zip(values, counts)}
    return TreeSummary(height, width, prof[1, 1] + tree.k - 1, hist)


@dataclass(frozen=True)
class PairDistanceSample:
    mean: float
    histogram: dict[int, int]
    pairs: int


def sample_pair_distance(tree: KTree, pairs: int, rng: np.random.Generator) -> PairDistanceSample:
    """Distances between uniformly chosen pairs of distinct vertices."""
    if pairs < 1:
        raise ConfigError("pairs must be >= 1")
    nv = tree.num_vertices
    if nv < 2:
        raise ConfigError("need at least two vertices")
    indptr, indices = tree.adjacency()
    src = rng.integers(0, nv, size=pairs)
    dst = rng.integers(0, nv - 1, size=pairs)
    dst = dst + (dst >= src)
    # one BFS per distinct source
    out = np.empty(pairs, dtype=np.int64)
    order = np.argsort(src, kind="stable")
    last = -1
    dist = None
    for idx in order:
        if src[idx] != last:
            last = src[idx]
            dist = _kernels.bfs(indptr, indices, last)
        out[idx] = dist[dst[idx]]
    values, counts = np.unique(out, return_counts=True)
    return PairDistanceSample(float(out.mean()), {int(v): int(c) for v, c in zip(values, counts)}, pairs)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class TrialRecord:
    profile: np.ndarray
    height: int
    width: int
    root_degree: int
    degree_histogram: dict[int, int]
    pair_distances: dict[int, int]


@dataclass
class SummaryStats:
    k: int
    n: int
    trials: int
    seed: int
    d_max: int
    mean: np.ndarray
    var: np.ndarray
    height: list[int] = field(repr=False)
    width: list[int] = field(repr=False)
    root_degree_histogram: dict[int, int] = field(default_factory=dict)
    degree_histogram: dict[int, int] = field(default_factory=dict)
    pair_distance_histogram: dict[int, int] = field(default_factory=dict)

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(self.var / self.trials)

    def histogram(self, values) -> dict[int, int]:
        vals, counts = np.unique(np.asarray(values), return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def rows(self):
        """One ``(k, n, d, j, mean, var, stderr, trials, seed)`` tuple per cell."""
        se = self.stderr
        for d in range(1, self.d_max + 1):
            for j in range(1, self.k + 1):
                yield (self.k, self.n, d, j, float(self.mean[d, j]), float(self.var[d, j]),
                       float(se[d, j]), self.trials, self.seed)

    def histogram_rows(self):
        stats = {
            "height": self.histogram(self.height),
            "width": self.histogram(self.width),
            "root_degree": self.root_degree_histogram,
            "degree": self.degree_histogram,
            "pair_distance": self.pair_distance_histogram,
        }
        for name, hist in stats.items():
            for value in sorted(hist):
                yield (self.k, self.n, name, value, hist[value])

    def to_csv(self) -> str:
        lines = ["k,n,d,j,mean,var,stderr,trials,seed"]
        lines += [f"{k},{n},{d},{j},{m!r},{v!r},{s!r},{t},{seed}"
                  for k, n, d, j, m, v, s, t, seed in self.rows()]
        return "\n".join(lines) + "\n"

    def histogram_csv(self) -> str:
        lines = ["k,n,stat,value,count"]
        lines += [f"{k},{n},{stat},{value},{count}" for k, n, stat, value, count in self.histogram_rows()]
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        se = self.stderr
        cells = [
            {"d": d, "j": j, "mean": float(self.mean[d, j]), "var": float(self.var[d, j]),
             "stderr": float(se[d, j])}
            for d in range(1, self.d_max + 1)
            for j in range(1, self.k + 1)
        ]
        return {
            "k": self.k,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "d_max": self.d_max,
            "profile": cells,
            "height": list(self.height),
            "width": list(self.width),
            "root_degree_histogram": _str_keys(self.root_degree_histogram),
            "degree_histogram": _str_keys(self.degree_histogram),
            "pair_distance_histogram": _str_keys(self.pair_distance_histogram),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def _str_keys(h: dict[int, int]) -> dict[str, int]:
    return {str(key): val for key, val in sorted(h.items())}


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return make_rng(seed, stream=trial)


def _run_trial(k, n, d_max, seed, trial, pairs) -> TrialRecord:
    rng = trial_rng(seed, trial)
    tree = grow_random(k, n, rng)
    prof = connectivity_profile(tree)
    summ = summary(tree, prof)
    pd = sample_pair_distance(tree, pairs, rng).histogram if pairs else {}
    return TrialRecord(prof.padded(d_max), summ.height, summ.width, summ.root_degree,
                       summ.degree_histogram, pd)


def default_d_max(n: int) -> int:
    return max(1, math.ceil(4 * math.log(n))) if n > 1 else 1


def monte_carlo(
    k: int,
    n: int,
    trials: int,
    d_max: int | None = None,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
    pairs: int = 0,
    max_cells: int = MAX_CELLS,
) -> SummaryStats:
    """Aggregate profiles over ``trials`` independent trees.

    Trial ``t`` uses the substream ``(seed, t)`` and records are reduced in
    trial order, so the result does not depend on ``threads``. Levels deeper
    than ``d_max`` are lumped into level ``d_max``.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if k * max(n, 1) * trials > max_cells:
        raise ResourceGuardError(f"k*n*trials = {k * n * trials} exceeds max_cells = {max_cells}")
    d_max = default_d_max(n) if d_max is None else int(d_max)
    if d_max < 1:
        raise ConfigError("d_max must be >= 1")

    def job(t):
        return _run_trial(k, n, d_max, seed, t, pairs)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(job, range(trials)))
    else:
        records = [job(t) for t in range(trials)]

    total = np.zeros((d_max + 1, k + 1))
    root_hist: dict[int, int] = {}
    deg_hist: dict[int, int] = {}
    pair_hist: dict[int, int] = {}
    for rec in records:
        total += rec.profile
        root_hist[rec.root_degree] = root_hist.get(rec.root_degree, 0) + 1
        for hist, part in ((deg_hist, rec.degree_histogram), (pair_hist, rec.pair_distances)):
            for key, val in part.items():
                hist[key] = hist.get(key, 0) + val
    mean = total / trials
    sq = np.zeros_like(mean)
    for rec in records:
        sq += (rec.profile - mean) ** 2
    var = sq / (trials - 1) if trials > 1 else sq
    return SummaryStats(
        k=k, n=n, trials=trials, seed=seed, d_max=d_max, mean=mean, var=var,
        height=[r.height for r in records], width=[r.width for r in records],
        root_degree_histogram=dict(sorted(root_hist.items())),
        degree_histogram=dict(sorted(deg_hist.items())),
        pair_distance_histogram=dict(sorted(pair_hist.items())),
    )
