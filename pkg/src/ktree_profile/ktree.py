"""Increasing k-trees: construction, random growth, counting and the tree bijection.

A tree is stored as the sequence of clique choices made while it grew. Clique 0
is the root clique ``(1, ..., k)``; vertex ``v = k + 1 + s`` attaches to clique
``choices[s]`` and creates cliques ``1 + s*k + t`` for ``t = 0..k-1``, where
clique ``1 + s*k + t`` is the parent clique with its ``(k-1-t)``-th smallest
member dropped and ``v`` appended. That keeps every clique a sorted tuple and
lists the new cliques in lexicographic order.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import ConfigError, ResourceGuardError

DEFAULT_SEED = 20100601
MAX_HISTORIES = 10**6


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """PCG64 generator for ``seed``; ``stream`` selects an independent substream."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed}")
    spawn_key = () if stream is None else (int(stream),)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def _check_k(k: int) -> int:
    if int(k) != k or k < 1:
        raise ConfigError(f"k must be an integer >= 1, got {k!r}")
    return int(k)


def _check_n(n: int) -> int:
    if int(n) != n or n < 0:
        raise ConfigError(f"n must be an integer >= 0, got {n!r}")
    return int(n)


@dataclass(frozen=True, eq=False)
class KTree:
    """An increasing k-tree with ``n`` added vertices (``n + k`` in total)."""

    k: int
    choices: np.ndarray = field(repr=False)
    seed: int | None = None

    def __post_init__(self):
        ch = np.ascontiguousarray(self.choices, dtype=np.int64)
        ch.setflags(write=False)
        object.__setattr__(self, "choices", ch)

    @property
    def n(self) -> int:
        return int(self.choices.shape[0])

    @property
    def num_vertices(self) -> int:
        return self.n + self.k

    @property
    def registry_size(self) -> int:
        return self.n * self.k + 1

    @property
    def num_edges(self) -> int:
        return self.n * self.k + self.k * (self.k - 1) // 2

    def __eq__(self, other):
        if not isinstance(other, KTree):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.choices, other.choices)

    def __hash__(self):
        return hash((self.k, self.choices.tobytes()))

    @cached_property
    def cliques(self) -> np.ndarray:
        """All registered cliques as an ``(n*k + 1, k)`` array, in creation order."""
        return _kernels.materialize_cliques(self.k, self.choices)

    def clique(self, index: int) -> tuple[int, ...]:
        """Labels of one clique, expanded by walking up its parents."""
        if not 0 <= index < self.registry_size:
            raise IndexError(f"clique index {index} out of range [0, {self.registry_size})")
        if "cliques" in self.__dict__:
            return tuple(int(x) for x in self.cliques[index])
        k = self.k
        path = []
        while index:
            s, t = divmod(index - 1, k)
            path.append((k - 1 - t, k + 1 + s))
            index = int(self.choices[s])
        members = list(range(1, k + 1))
        for drop, v in reversed(path):
            del members[drop]
            members.append(v)
        return tuple(members)

    @property
    def attachments(self) -> list[tuple[int, ...]]:
        """Entry ``i`` is the clique that vertex ``k + 1 + i`` was attached to."""
        cl = self.cliques
        return [tuple(int(x) for x in cl[c]) for c in self.choices]

    def edges(self) -> np.ndarray:
        """Edge array ``(u, v)`` with ``u < v``, ordered by creation."""
        k, n = self.k, self.n
        root = [(a, b) for a, b in itertools.combinations(range(1, k + 1), 2)]
        head = np.array(root, dtype=np.int64).reshape(-1, 2)
        if n == 0:
            return head
        att = self.cliques[self.choices]
        new = np.repeat(np.arange(k + 1, k + n + 1, dtype=np.int64), k)
        tail = np.column_stack([att.reshape(-1), new])
        return np.vstack([head, tail])

    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR adjacency ``(indptr, indices)`` over 0-based vertex indices."""
        e = self.edges() - 1
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.argsort(src, kind="stable")
        counts = np.bincount(src, minlength=self.num_vertices)
        indptr = np.zeros(self.num_vertices + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return indptr, dst[order]

    def degrees(self) -> np.ndarray:
        """Degree of vertex ``v`` at index ``v - 1``."""
        k, nv = self.k, self.num_vertices
        deg = np.full(nv, k, dtype=np.int64)
        deg[:k] = k - 1
        if self.n:
            deg += np.bincount(self.cliques[self.choices].reshape(-1) - 1, minlength=nv)
        return deg

    def to_edge_list(self) -> str:
        seed = "none" if self.seed is None else str(self.seed)
        lines = [f"# ktree k={self.k} n={self.n} seed={seed}"]
        lines += [f"{u} {v}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"

    def to_clique_json(self) -> str:
        return json.dumps(self.cliques.tolist())


def new_root_clique(k: int) -> KTree:
    return KTree(_check_k(k), np.zeros(0, dtype=np.int64))


def apply_step(tree: KTree, clique_index: int) -> KTree:
    """Attach vertex ``k + n + 1`` to clique ``clique_index``."""
    if int(clique_index) != clique_index or not 0 <= clique_index < tree.registry_size:
        raise ConfigError(
            f"clique_index {clique_index} out of range [0, {tree.registry_size})"
        )
    return KTree(tree.k, np.append(tree.choices, int(clique_index)), seed=tree.seed)


def random_choices(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    # Step s picks uniformly among s*k + 1 cliques, independently of the shape.
    highs = np.arange(n, dtype=np.int64) * k + 1
    return rng.integers(0, highs, dtype=np.int64) if n else np.zeros(0, dtype=np.int64)


def grow_random(k: int, n: int, rng: np.random.Generator | int | None = None) -> KTree:
    """Grow a random increasing k-tree with ``n`` added vertices.

    ``rng`` may be a Generator or an integer seed; ``None`` uses the package
    default seed.
    """
    k, n = _check_k(k), _check_n(n)
    seed = None
    if rng is None:
        rng = DEFAULT_SEED
    if isinstance(rng, (int, np.integer)):
        seed = int(rng)
        rng = make_rng(seed)
    return KTree(k, random_choices(k, n, rng), seed=seed)


def count_ktrees(k: int, n: int) -> int:
    """Number of increasing k-trees with ``n + k`` vertices."""
    k, n = _check_k(k), _check_n(n)
    return math.prod(i * k + 1 for i in range(n))


def enumerate_histories(k: int, n: int, limit: int = MAX_HISTORIES) -> Iterator[KTree]:
    """Yield every increasing k-tree of ``n + k`` vertices exactly once."""
    total = count_ktrees(k, n)
    if total > limit:
        raise ResourceGuardError(f"{total} histories exceed the limit of {limit}")
    ranges = [range(i * k + 1) for i in range(n)]
    for seq in itertools.product(*ranges):
        yield KTree(k, np.array(seq, dtype=np.int64))


# ---------------------------------------------------------------------------
# Tree representation: white nodes are k-cliques, black nodes are (k+1)-cliques.


@dataclass
class WhiteNode:
    children: list[BlackNode] = field(default_factory=list)


@dataclass
class BlackNode:
    label: int
    children: tuple[WhiteNode, ...] = ()


@dataclass
class TreeRepr:
    k: int
    root: WhiteNode
    root_labels: tuple[int, ...]

    def black_nodes(self) -> list[BlackNode]:
        out = []
        stack = [self.root]
        while stack:
            white = stack.pop()
            for b in white.children:
                out.append(b)
                stack.extend(b.children)
        return out

    def white_count(self) -> int:
        return 1 + sum(len(b.children) for b in self.black_nodes())


def to_tree_repr(tree: KTree) -> TreeRepr:
    k = tree.k
    whites = [WhiteNode()]
    for s, c in enumerate(tree.choices):
        # the k new cliques of vertex k+1+s get consecutive ids
        kids = tuple(WhiteNode() for _ in range(k))
        whites.extend(kids)
        whites[int(c)].children.append(BlackNode(k + 1 + s, kids))
    return TreeRepr(k, whites[0], tuple(range(1, k + 1)))


def from_tree_repr(rep: TreeRepr) -> KTree:
    """Rebuild the k-tree; white children order fixes the clique numbering."""
    k = rep.k
    if rep.root_labels != tuple(range(1, k + 1)):
        raise ConfigError(f"root must be labeled 1..{k}, got {rep.root_labels}")
    parent: dict[int, int] = {}
    stack: list[tuple[WhiteNode, int, int]] = [(rep.root, 0, k)]
    while stack:
        white, wid, floor = stack.pop()
        for b in white.children:
            if b.label <= floor:
                raise ConfigError(f"label {b.label} does not exceed its ancestor label {floor}")
            if len(b.children) != k:
                raise ConfigError(f"black node {b.label} has {len(b.children)} children, expected {k}")
            if b.label in parent:
                raise ConfigError(f"label {b.label} appears twice")
            parent[b.label] = wid
            base = 1 + (b.label - k - 1) * k
            for t, child in enumerate(b.children):
                stack.append((child, base + t, b.label))
    n = len(parent)
    if sorted(parent) != list(range(k + 1, k + n + 1)):
        raise ConfigError("black labels must be exactly k+1..k+n")
    choices = np.array([parent[v] for v in range(k + 1, k + n + 1)], dtype=np.int64)
    for s, c in enumerate(choices):
        if c > s * k:
            raise ConfigError(f"vertex {k + 1 + s} hangs below a clique created later")
    return KTree(k, choices)

