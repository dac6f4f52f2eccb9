"""Coupled sampling of sparse weighted symmetric adjacency matrices, and
Karp-Sipser leaf removal.

The edge support of every sampled object is driven by a
:class:`CouplingSource`: a lazily evaluated array of uniforms ``q(i, j)``
that is a pure function of ``(seed, i, j)``.  An edge ``{i, j}`` is present
iff ``q(i, j) < p``, so raising ``p`` with a fixed source only adds edges,
and matrices of different sizes share the support of their common block.
Weights come from a symmetric :class:`WeightTemplate` with nonzero entries.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ResourceCapError
from .exactla import DEFAULT_RATIONAL_CAP, Matrix
from .field import RATIONAL_POOL, FieldElement, FieldSpec
from .prf import Stream, prf, prf_array

_TWO64 = float(1 << 64)


@dataclass(frozen=True)
class CouplingSource:
    """Uniform values ``q(i, j) in [0, 1)`` for unordered pairs, seeded."""

    seed: int

    def q(self, i: int, j: int) -> float:
        if i == j:
            raise ValueError("q is defined for distinct vertices only")
        lo, hi = (i, j) if i < j else (j, i)
        return prf(self.seed, lo, hi) / _TWO64

    def _q_row(self, i: int, jj: np.ndarray) -> np.ndarray:
        ii = np.full(jj.shape, i, dtype=np.uint64)
        return prf_array(self.seed, ii, jj.astype(np.uint64)).astype(np.float64) / _TWO64


@dataclass(frozen=True)
class WeightTemplate:
    """Symmetric grid of nonzero weights prescribing edge values.

    ``allones`` uses the multiplicative identity everywhere; ``random``
    draws a seeded nonzero element per unordered pair (uniform residue for
    prime fields, uniform over the bounded pool for the rationals).
    """

    field: FieldSpec
    n: int
    kind: str = "allones"  # "allones" | "random"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("allones", "random"):
            raise ValueError(f"unknown template kind {self.kind!r}")

    def entry(self, i: int, j: int) -> FieldElement:
        if i == j:
            raise ValueError("templates carry off-diagonal entries only")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError("template index out of range")
        return FieldElement(self.field, self._raw(min(i, j), max(i, j)))

    def _raw(self, lo: int, hi: int):
        if self.kind == "allones":
            return Fraction(1) if self.field.kind == "rationals" else 1
        h = prf(self.seed, lo, hi)
        if self.field.kind == "prime":
            return 1 + h % (self.field.p - 1)
        return RATIONAL_POOL[h % len(RATIONAL_POOL)]

    def _raw_row(self, i: int, jj: np.ndarray) -> np.ndarray:
        """Vector of residues against a fixed row index (prime fields)."""
        lo = np.minimum(jj, i)
        hi = np.maximum(jj, i)
        return self._raw_row_pairs(lo, hi)

    def _raw_row_pairs(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Vector weights for explicit (lo, hi) index pairs (prime fields)."""
        if self.field.kind != "prime":
            raise ValueError("vector weights are for prime fields")
        if self.kind == "allones" or self.field.p == 2:
            return np.ones(lo.shape, dtype=np.int64)
        h = prf_array(self.seed, lo.astype(np.uint64), hi.astype(np.uint64))
        return 1 + (h % np.uint64(self.field.p - 1)).astype(np.int64)


@dataclass(frozen=True)
class Graph:
    """Simple weighted graph: vertices ``0..n-1``, nonzero edge weights."""

    n: int
    field: FieldSpec
    edges: tuple  # ((i, j, raw_weight), ...) with i < j

    def __post_init__(self):
        seen = set()
        for i, j, w in self.edges:
            if i == j:
                raise ValueError("self-loops are not allowed")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError("edge endpoint out of range")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            if w == 0:
                raise ValueError("edge weights must be nonzero")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def adjacency(self) -> Matrix:
        """Weighted adjacency matrix (symmetric, zero diagonal)."""
        if self.field.kind == "prime":
            arr = np.zeros((self.n, self.n), dtype=np.int64)
            for i, j, w in self.edges:
                arr[i, j] = w
                arr[j, i] = w
            return Matrix._from_array(self.field, arr, symmetric=True)
        rows = [[Fraction(0)] * self.n for _ in range(self.n)]
        for i, j, w in self.edges:
            rows[i][j] = w
            rows[j][i] = w
        return Matrix.from_rows(self.field, rows, symmetric=True)


# ------------------------------------------------------------------ sampling


def _validate_sample_args(n: int, p: float, template: WeightTemplate):
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    if template.n < n:
        raise ValueError(f"template size {template.n} smaller than n={n}")


def sample_edges(n: int, p: float, coupling: CouplingSource) -> tuple[np.ndarray, np.ndarray]:
    """Edge support under the monotone coupling: pairs with q(i, j) < p."""
    ii_out, jj_out = [], []
    for i in range(n - 1):
        jj = np.arange(i + 1, n, dtype=np.int64)
        mask = coupling._q_row(i, jj) < p
        hit = jj[mask]
        if hit.size:
            ii_out.append(np.full(hit.shape, i, dtype=np.int64))
            jj_out.append(hit)
    if not ii_out:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(ii_out), np.concatenate(jj_out)


def sample_graph(
    n: int, p: float, template: WeightTemplate, coupling: CouplingSource
) -> Graph:
    """Weighted graph with independent edges at probability ``p``."""
    _validate_sample_args(n, p, template)
    ii, jj = sample_edges(n, p, coupling)
    if template.field.kind == "prime":
        ww = template._raw_row_pairs(ii, jj)
        edges = tuple((int(a), int(b), int(w)) for a, b, w in zip(ii, jj, ww))
    else:
        edges = tuple(
            (int(a), int(b), template._raw(int(a), int(b))) for a, b in zip(ii, jj)
        )
    return Graph(n=n, field=template.field, edges=edges)


def sample_A(
    n: int, p: float, template: WeightTemplate, coupling: CouplingSource
) -> Matrix:
    """Adjacency matrix of :func:`sample_graph`, built without the edge list."""
    _validate_sample_args(n, p, template)
    if template.field.kind != "prime":
        return sample_graph(n, p, template, coupling).adjacency()
    arr = np.zeros((n, n), dtype=np.int64)
    for i in range(n - 1):
        jj = np.arange(i + 1, n, dtype=np.int64)
        hit = jj[coupling._q_row(i, jj) < p]
        if hit.size:
            ww = template._raw_row(i, hit)
            arr[i, hit] = ww
            arr[hit, i] = ww
    return Matrix._from_array(template.field, arr, symmetric=True)


def uniform_permutation(N: int, perm_seed: int) -> list[int]:
    """Seeded Fisher-Yates permutation of ``range(N)`` (exactly uniform)."""
    perm = list(range(N))
    Stream(perm_seed).shuffle(perm)
    return perm


def sample_T(
    n: int,
    N: int,
    p: float,
    template: WeightTemplate,
    coupling: CouplingSource,
    perm_seed: int = 0,
    perm=None,
) -> Matrix:
    """Principal ``n x n`` block of the size-``N`` sample after a uniform
    relabelling of its vertices.

    With the same seeds, the result for ``n`` is the leading principal
    submatrix of the result for ``n + 1``, and for ``n = N`` it has the
    same rank as the unpermuted sample.  ``perm`` overrides the seeded
    permutation (e.g. ``range(N)`` for the identity).
    """
    if n > N:
        raise ValueError(f"n={n} exceeds N={N}")
    _validate_sample_args(N, p, template)
    u = list(perm) if perm is not None else uniform_permutation(N, perm_seed)
    if sorted(u) != list(range(N)):
        raise ValueError("perm must be a permutation of range(N)")
    if template.field.kind == "prime":
        arr = np.zeros((n, n), dtype=np.int64)
        uu = np.asarray(u, dtype=np.int64)
        for i in range(n - 1):
            jj = np.arange(i + 1, n, dtype=np.int64)
            lo = np.minimum(uu[i], uu[jj]).astype(np.uint64)
            hi = np.maximum(uu[i], uu[jj]).astype(np.uint64)
            q = prf_array(coupling.seed, lo, hi).astype(np.float64) / _TWO64
            mask = q < p
            hit = jj[mask]
            if hit.size:
                ww = template._raw_row_pairs(lo[mask].astype(np.int64), hi[mask].astype(np.int64))
                arr[i, hit] = ww
                arr[hit, i] = ww
        return Matrix._from_array(template.field, arr, symmetric=True)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a, b = u[i], u[j]
            if coupling.q(a, b) < p:
                w = template._raw(min(a, b), max(a, b))
                rows[i][j] = w
                rows[j][i] = w
    return Matrix.from_rows(template.field, rows, symmetric=True)


# ------------------------------------------------------------- leaf removal


@dataclass(frozen=True)
class KSResult:
    """Outcome of exhaustive leaf removal.

    ``core_vertices`` are original vertex ids (min degree two in ``core``,
    which is reindexed compactly in that order); every vertex is accounted
    for: ``isolated_count + len(core_vertices) + 2 * len(removed_pairs)``
    equals ``n``.
    """

    isolated_count: int
    core: Graph
    core_vertices: tuple
    removed_pairs: tuple


def karp_sipser(G: Graph, order_seed: int | None = None) -> KSResult:
    """Remove degree-one vertices with their unique neighbors until only
    isolated vertices and a minimum-degree-two core remain.

    By default the lowest-index leaf is removed first (deterministic);
    ``order_seed`` randomizes the order instead.  The isolated count and
    core vertex set do not depend on the order, only ``removed_pairs`` may.
    """
    n = G.n
    adj: list[dict] = [dict() for _ in range(n)]
    for i, j, w in G.edges:
        adj[i][j] = w
        adj[j][i] = w
    alive = [True] * n
    pairs = []

    stream = None if order_seed is None else Stream(order_seed)
    bag: list[int] = [v for v in range(n) if len(adj[v]) == 1]
    if stream is None:
        heapq.heapify(bag)

    def pop_leaf() -> int:
        if stream is None:
            return heapq.heappop(bag)
        k = stream.randbelow(len(bag))
        bag[k], bag[-1] = bag[-1], bag[k]
        return bag.pop()

    def push_leaf(v: int) -> None:
        if stream is None:
            heapq.heappush(bag, v)
        else:
            bag.append(v)

    while bag:
        v = pop_leaf()
        if not alive[v] or len(adj[v]) != 1:
            continue  # stale entry: degree changed since it was queued
        u = next(iter(adj[v]))
        for x in list(adj[u]):
            del adj[x][u]
            if x != v and alive[x] and len(adj[x]) == 1:
                push_leaf(x)
        adj[u].clear()
        adj[v].clear()
        alive[v] = alive[u] = False
        pairs.append((v, u))

    isolated = sum(1 for v in range(n) if alive[v] and not adj[v])
    core_vertices = tuple(v for v in range(n) if alive[v] and adj[v])
    index = {v: k for k, v in enumerate(core_vertices)}
    core_edges = tuple(
        (index[i], index[j], w)
        for i in core_vertices
        for j, w in adj[i].items()
        if i < j
    )
    core = Graph(n=len(core_vertices), field=G.field, edges=core_edges)
    if min((len(adj[v]) for v in core_vertices), default=2) < 2:
        raise AssertionError("leaf removal left a low-degree core vertex")
    if isolated + len(core_vertices) + 2 * len(pairs) != n:
        raise AssertionError("leaf removal lost vertices")
    return KSResult(
        isolated_count=isolated,
        core=core,
        core_vertices=core_vertices,
        removed_pairs=tuple(pairs),
    )


def nullity_invariance_check(G: Graph, *, cap: int = 4096) -> bool:
    """Exact check that leaf removal preserves the adjacency nullity:
    ``nul(A(G)) == isolated_count + nul(A(core))`` over the graph's field.
    """
    if G.n > cap:
        raise ResourceCapError(f"graph has {G.n} vertices, above the exact-rank cap {cap}")
    if G.field.kind == "rationals" and G.n > DEFAULT_RATIONAL_CAP:
        raise ResourceCapError(
            f"rational adjacency of size {G.n} above the cap {DEFAULT_RATIONAL_CAP}"
        )
    ks = karp_sipser(G)
    lhs = G.adjacency().nullity()
    rhs = ks.isolated_count + (ks.core.adjacency().nullity() if ks.core.n else 0)
    return lhs == rhs


# ------------------------------------------------------------- text format


def format_graph(G: Graph) -> str:
    """Text form: header "n m field", then one "i j weight" line per edge."""
    lines = [f"{G.n} {G.edge_count} {G.field.label()}"]
    for i, j, w in G.edges:
        lines.append(f"{i} {j} {w}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty graph file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError('graph header must be "n m field"')
    n, m = int(head[0]), int(head[1])
    field = FieldSpec.parse_label(head[2])
    if len(lines) != m + 1:
        raise ValueError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) != 3:
            raise ValueError('edge lines must be "i j weight"')
        i, j = int(toks[0]), int(toks[1])
        w = field.parse_entry(toks[2]).value
        edges.append((min(i, j), max(i, j), w))
    return Graph(n=n, field=field, edges=tuple(edges))
