"""The G~(n, m) multigraph model, independent-set weights and MIS solvers."""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np

EXACT_CAP = int(os.environ.get("MISBOUNDS_EXACT_CAP", "64"))
ALGORITHMS = ("exact", "karp-sipser", "greedy-random")


class SizeError(ValueError):
    """Input exceeds a configured work or size budget."""


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """``n`` vertices and ``m`` ordered vertex pairs; loops and repeats allowed."""

    n: int
    edges: np.ndarray

    def __post_init__(self):
        edges = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.n < 1:
            raise ValueError("a graph needs at least one vertex")
        if edges.size and (edges.min() < 0 or edges.max() >= self.n):
            raise ValueError("edge endpoint out of range")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degree(self) -> np.ndarray:
        # a loop at v adds 2 to deg(v)
        return np.bincount(self.edges.ravel(), minlength=self.n)

    @property
    def loops(self) -> np.ndarray:
        """Boolean mask of vertices carrying a self-loop."""
        mask = np.zeros(self.n, dtype=bool)
        e = self.edges
        mask[e[e[:, 0] == e[:, 1], 0]] = True
        return mask

    def neighbours(self) -> list[set[int]]:
        """Adjacency of the simple projection: no loops, no repeated edges."""
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges.tolist():
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return adj

    def __eq__(self, other):
        return isinstance(other, MultiGraph) and self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))


@dataclass(frozen=True)
class SimResult:
    seed: int
    n: int
    m: int
    algorithm: str
    size: int
    ratio: float
    wall_time: float


def sample(n: int, m: int, seed) -> MultiGraph:
    """Draw ``m`` ordered pairs uniformly from the ``n**2`` possibilities."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    rng = np.random.default_rng(seed)
    return MultiGraph(n, rng.integers(0, n, size=(m, 2)))


def is_independent(g: MultiGraph, s: Iterable[int]) -> bool:
    inside = np.zeros(g.n, dtype=bool)
    inside[list(s)] = True
    e = g.edges
    return not np.any(inside[e[:, 0]] & inside[e[:, 1]])


def weight(g: MultiGraph, s: Iterable[int], mu: float) -> float:
    """``mu`` to the number of edges with no endpoint in ``s``; 0 if ``s`` is not independent."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    inside = np.zeros(g.n, dtype=bool)
    inside[list(s)] = True
    a = inside[g.edges[:, 0]]
    b = inside[g.edges[:, 1]]
    if np.any(a & b):
        return 0.0
    return mu ** int(np.count_nonzero(~a & ~b))


def weight_product(g: MultiGraph, s: Iterable[int], mu: float) -> float:
    """Same value as :func:`weight`, as a product of per-edge factors."""
    s = set(s)
    w = 1.0
    for u, v in g.edges.tolist():
        iu, iv = u in s, v in s
        if iu and iv:
            return 0.0
        if not iu and not iv:
            w *= mu
    return w


def is_maximal(g: MultiGraph, s: Iterable[int]) -> bool:
    """No vertex outside ``s`` can be added while keeping it independent."""
    s = set(s)
    adj = g.neighbours()
    loops = g.loops
    for v in range(g.n):
        if v in s or loops[v]:
            continue
        if not adj[v] & s:
            return False
    return True


def karp_sipser(g: MultiGraph, seed) -> frozenset[int]:
    """Degree-one-first greedy independent set.

    Loop vertices are discarded up front.  While some vertex has degree at
    most one, a uniformly chosen one joins the set and its neighbour is
    deleted; otherwise a uniformly random vertex joins the set and all its
    neighbours are deleted.
    """
    rng = np.random.default_rng(seed)
    adj = g.neighbours()
    alive = set(range(g.n))
    for v in np.flatnonzero(g.loops).tolist():
        alive.discard(v)
        for u in adj[v]:
            adj[u].discard(v)
        adj[v] = set()
    low = {v for v in alive if len(adj[v]) <= 1}
    chosen = []

    def remove(v):
        alive.discard(v)
        low.discard(v)
        for u in adj[v]:
            adj[u].discard(v)
            if len(adj[u]) <= 1 and u in alive:
                low.add(u)
        adj[v] = set()

    while alive:
        if low:
            pool = sorted(low)
        else:
            pool = sorted(alive)
        v = pool[int(rng.integers(len(pool)))]
        chosen.append(v)
        for u in list(adj[v]):
            remove(u)
        remove(v)
    return frozenset(chosen)


def greedy_random(g: MultiGraph, seed) -> frozenset[int]:
    """Scan vertices in random order, keeping each one that fits."""
    rng = np.random.default_rng(seed)
    adj = g.neighbours()
    loops = g.loops
    taken: set[int] = set()
    for v in rng.permutation(g.n).tolist():
        if not loops[v] and not adj[v] & taken:
            taken.add(v)
    return frozenset(taken)


def _clique_cover(cand: int, adj: list[int]) -> int:
    """Greedy clique partition size of ``cand``: an upper bound on its MIS."""
    count = 0
    while cand:
        low = cand & -cand
        v = low.bit_length() - 1
        clique = low
        common = adj[v] & cand
        while common:
            b = common & -common
            clique |= b
            common &= adj[b.bit_length() - 1]
        cand &= ~clique
        count += 1
    return count


def exact_mis(g: MultiGraph, cap: int | None = None) -> frozenset[int]:
    """Maximum independent set of the simple projection by branch and bound.

    Degree-0 and degree-1 vertices are taken greedily (always safe); other
    nodes branch on a maximum-degree vertex and are pruned with a greedy
    clique-cover bound.
    """
    cap = EXACT_CAP if cap is None else cap
    if g.n > cap:
        raise SizeError(f"exact_mis is capped at n={cap}, got n={g.n}")
    nbr = g.neighbours()
    adj = [sum(1 << u for u in nbr[v]) for v in range(g.n)]
    start = 0
    loops = g.loops
    for v in range(g.n):
        if not loops[v]:
            start |= 1 << v

    best_size = -1
    best_set = 0

    def solve(cand: int, cur: int, size: int):
        nonlocal best_size, best_set
        while True:
            # take every vertex whose remaining degree is <= 1
            changed = False
            rest = cand
            while rest:
                b = rest & -rest
                rest ^= b
                if not cand & b:
                    continue
                v = b.bit_length() - 1
                nb = adj[v] & cand
                if nb & (nb - 1) == 0:
                    cur |= b
                    size += 1
                    cand &= ~(b | nb)
                    changed = True
            if not changed:
                break
        if cand == 0:
            if size > best_size:
                best_size, best_set = size, cur
            return
        if size + _clique_cover(cand, adj) <= best_size:
            return
        pick, pick_deg = -1, -1
        rest = cand
        while rest:
            b = rest & -rest
            rest ^= b
            v = b.bit_length() - 1
            d = bin(adj[v] & cand).count("1")
            if d > pick_deg:
                pick, pick_deg = v, d
        b = 1 << pick
        solve(cand & ~b & ~adj[pick], cur | b, size + 1)
        solve(cand & ~b, cur, size)

    solve(start, 0, 0)
    return frozenset(v for v in range(g.n) if best_set >> v & 1)


_SOLVERS = {
    "exact": lambda g, seed: exact_mis(g),
    "karp-sipser": karp_sipser,
    "greedy-random": greedy_random,
}


def run_trials(n: int, c: float, trials: int, algorithm: str, seed: int) -> list[SimResult]:
    """Sample ``trials`` graphs with ``m = round(c n / 2)`` and run one solver on each.

    Trial ``i`` uses seed ``seed + i`` for both the graph and the solver.
    """
    if algorithm not in _SOLVERS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    if algorithm == "exact" and n > EXACT_CAP:
        raise SizeError(f"exact_mis is capped at n={EXACT_CAP}, got n={n}")
    m = int(round(c * n / 2))
    solver = _SOLVERS[algorithm]
    out = []
    for i in range(trials):
        s = seed + i
        g = sample(n, m, s)
        t0 = time.perf_counter()
        found = solver(g, s)
        elapsed = time.perf_counter() - t0
        if not is_independent(g, found) or not is_maximal(g, found):
            raise RuntimeError(f"{algorithm} returned an invalid set on trial {i}")
        out.append(SimResult(s, n, m, algorithm, len(found), len(found) / n, elapsed))
    return out


def summarize(results: list[SimResult]) -> dict[str, float]:
    if not results:
        return {}
    r = np.array([x.ratio for x in results])
    q = np.quantile(r, [0.0, 0.25, 0.5, 0.75, 1.0])
    return {
        "trials": len(results),
        "mean": float(r.mean()),
        "min": float(q[0]),
        "q25": float(q[1]),
        "median": float(q[2]),
        "q75": float(q[3]),
        "max": float(q[4]),
    }


def write_graph(g: MultiGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in g.edges.tolist():
            fh.write(f"{u} {v}\n")


def read_graph(path) -> MultiGraph:
    with open(path) as fh:
        lines = [ln.split() for ln in fh if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise ValueError(f"{path}: missing 'n m' header")
    n, m = int(lines[0][0]), int(lines[0][1])
    body = lines[1:]
    if len(body) != m or any(len(p) != 2 for p in body):
        raise ValueError(f"{path}: expected {m} lines of 'u v'")
    return MultiGraph(n, [(int(u), int(v)) for u, v in body])
