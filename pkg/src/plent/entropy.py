"""Entropy estimation and certification for set-valued relations.

Three independent routes live here:

* orbit enumeration with (n, eps)-separated / spanning counts,
* certified horseshoes (exact cross-coverage of disjoint intervals),
* the bracket pipeline squeezing the entropy of a parameterized curve
  between horseshoe lower bounds and branch-count upper bounds.
"""

from __future__ import annotations

import math
import os
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional, Sequence

from .branch import branch_counts
from .errors import CompositionError, ResourceError
from .plmap import Interval, PLMap, UNIT, as_rat, intervals_cover, iterate, merge_intervals
from .relation import (
    PLRelation,
    fiber_intervals,
    image_of_interval,
    param_graph,
    rel_power,
    strongly_commutes,
)

def worker_count() -> int:
    """Worker count from PLENT_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("PLENT_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Apply fn preserving input order; results are identical for any
    worker count, so parallel runs produce identical artifacts."""
    workers = worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# orbit enumeration


@dataclass(frozen=True)
class OrbitSet:
    n: int
    grid: Fraction
    orbits: tuple[tuple[Fraction, ...], ...]


def _successors(rel: PLRelation, x: Fraction, grid: Fraction) -> list[Fraction]:
    """Exact points reachable from x in one step: isolated fiber points,
    interval-fiber endpoints, and grid multiples inside interval fibers."""
    out = set()
    for iv in fiber_intervals(rel, x):
        out.add(iv.lo)
        out.add(iv.hi)
        if not iv.is_point():
            k = math.ceil(iv.lo / grid)
            v = k * grid
            while v <= iv.hi:
                out.add(v)
                v += grid
    return sorted(out)


def enumerate_orbits(
    rel: PLRelation, n: int, grid: Fraction, cap_orbits: int = 200_000
) -> OrbitSet:
    """All length-n orbits of the relation starting on the grid.

    Every consecutive pair of an orbit is exactly a member of the relation;
    interval fibers are sampled at their endpoints and interior grid
    multiples, so membership is exact even though the set is finite.
    """
    grid = as_rat(grid)
    if grid <= 0:
        raise ValueError("grid must be positive")
    starts = [k * grid for k in range(math.floor(1 / grid) + 1) if k * grid <= 1]
    succ_cache: dict[Fraction, list[Fraction]] = {}

    def successors(x: Fraction) -> list[Fraction]:
        # benign concurrent recomputation: values are deterministic
        if x not in succ_cache:
            succ_cache[x] = _successors(rel, x, grid)
        return succ_cache[x]

    def expand(start: Fraction) -> list[tuple[Fraction, ...]]:
        frontier = [(start,)]
        for _ in range(n - 1):
            nxt = []
            for orbit in frontier:
                for y in successors(orbit[-1]):
                    nxt.append(orbit + (y,))
                    if len(nxt) > cap_orbits:
                        raise ResourceError(
                            f"orbit count exceeds cap {cap_orbits}",
                            partial=OrbitSet(n, grid, tuple(nxt)),
                        )
            frontier = nxt
        return frontier

    orbits: list[tuple[Fraction, ...]] = []
    for chunk in parallel_map(expand, starts):
        orbits.extend(chunk)
        if len(orbits) > cap_orbits:
            raise ResourceError(
                f"orbit count exceeds cap {cap_orbits}",
                partial=OrbitSet(n, grid, tuple(orbits)),
            )
    return OrbitSet(n, grid, tuple(orbits))


# ---------------------------------------------------------------------------
# separated / spanning counts


def _orbit_separated(a: Sequence[Fraction], b: Sequence[Fraction], eps: Fraction) -> bool:
    return any(abs(x - y) > eps for x, y in zip(a, b))


def _max_independent(nodes: list[int], adj: dict[int, set[int]]) -> int:
    """Exact maximum independent set size (branch and bound)."""
    if not nodes:
        return 0
    v = max(nodes, key=lambda u: len(adj[u] & set(nodes)))
    live = set(nodes)
    neighbors = adj[v] & live
    if not neighbors:
        # v is isolated among the remaining nodes
        rest = [u for u in nodes if u != v]
        return 1 + _max_independent(rest, adj)
    with_v = [u for u in nodes if u != v and u not in neighbors]
    without_v = [u for u in nodes if u != v]
    return max(1 + _max_independent(with_v, adj), _max_independent(without_v, adj))


def separated_count(
    points: Sequence[Sequence[Fraction]],
    eps: Fraction,
    separated=_orbit_separated,
    component_cap: int = 24,
) -> int:
    """Largest number of pairwise eps-separated points.

    Exact (max independent set of the closeness graph) on every connected
    component of at most `component_cap` points; larger components fall
    back to a greedy packing, which still yields a valid lower bound.
    """
    eps = as_rat(eps)
    n = len(points)
    adj: dict[int, set[int]] = {i: set() for i in range(n)}
    for i, j in combinations(range(n), 2):
        if not separated(points[i], points[j], eps):
            adj[i].add(j)
            adj[j].add(i)
    seen = set()
    total = 0
    for start in range(n):
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = [start]
        while queue:
            u = queue.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        if len(comp) <= component_cap:
            total += _max_independent(comp, adj)
        else:
            chosen: list[int] = []
            for u in sorted(comp):
                if all(w not in adj[u] for w in chosen):
                    chosen.append(u)
            total += len(chosen)
    return total


def spanning_count(
    points: Sequence[Sequence[Fraction]],
    eps: Fraction,
    separated=_orbit_separated,
    exact_cap: int = 16,
) -> int:
    """Smallest subset within eps of every point (exact set cover for at
    most `exact_cap` points, greedy upper bound beyond)."""
    eps = as_rat(eps)
    n = len(points)
    covers = [
        {j for j in range(n) if not separated(points[i], points[j], eps)}
        for i in range(n)
    ]
    if n <= exact_cap:
        for size in range(1, n + 1):
            for subset in combinations(range(n), size):
                hit = set()
                for i in subset:
                    hit |= covers[i]
                if len(hit) == n:
                    return size
        return n
    uncovered = set(range(n))
    count = 0
    while uncovered:
        best = max(range(n), key=lambda i: len(covers[i] & uncovered))
        uncovered -= covers[best]
        count += 1
    return count


@dataclass(frozen=True)
class EstimateRow:
    n: int
    eps: Fraction
    grid: Fraction
    s_count: int
    r_count: int
    estimate: float


def entropy_estimate(
    rel: PLRelation,
    eps_schedule: Sequence[Fraction],
    n_max: int,
    grid: Fraction,
    cap_orbits: int = 200_000,
) -> list[EstimateRow]:
    """Orbit-growth entropy table: one row per (n, eps), with the
    separated-count estimate (1/n) log s and the spanning count alongside."""
    rows = []
    for n in range(1, n_max + 1):
        orbits = enumerate_orbits(rel, n, grid, cap_orbits=cap_orbits).orbits
        for eps in eps_schedule:
            eps = as_rat(eps)
            s = separated_count(orbits, eps)
            r = spanning_count(orbits, eps, exact_cap=0)  # greedy on big sets
            rows.append(EstimateRow(n, eps, as_rat(grid), s, r, math.log(s) / n if s > 1 else 0.0))
    return rows


# ---------------------------------------------------------------------------
# horseshoes


@dataclass(frozen=True)
class HorseshoeCert:
    """N pairwise disjoint intervals whose union lies in the image of each
    one; verified exactly, so log N is a true entropy lower bound."""

    intervals: tuple[Interval, ...]

    @property
    def n(self) -> int:
        return len(self.intervals)

    @property
    def bound(self) -> float:
        return math.log(self.n)


def _covers_all(merged: list[Interval], targets: list[Interval]) -> bool:
    """merged: disjoint sorted intervals; targets: sorted.  Exact check that
    every target lies inside some merged component."""
    j = 0
    for tgt in targets:
        while j < len(merged) and merged[j].hi < tgt.hi:
            j += 1
        if j == len(merged) or merged[j].lo > tgt.lo:
            return False
    return True


def verify_horseshoe(rel: PLRelation, intervals: Sequence[Interval]) -> bool:
    """Exact check: intervals pairwise disjoint and nondegenerate, and every
    interval's image under the relation covers their union."""
    ivs = sorted(intervals, key=lambda iv: iv.lo)
    if len(ivs) < 2 or any(iv.is_point() for iv in ivs):
        return False
    for a, b in zip(ivs, ivs[1:]):
        if a.hi >= b.lo:
            return False
    # bucket each arc's image by the source intervals its domain meets;
    # one pass over the arcs instead of one per source interval
    los = [iv.lo for iv in ivs]
    images: list[list[Interval]] = [[] for _ in ivs]
    for arc in rel.arcs:
        dom = arc.dom
        i = bisect_right(los, dom.lo) - 1
        if i < 0:
            i = 0
        while i < len(ivs) and ivs[i].lo <= dom.hi:
            img = arc.image(ivs[i])
            if img is not None:
                images[i].append(img)
            i += 1
    return all(_covers_all(merge_intervals(imgs), ivs) for imgs in images)


def _subdivision_patterns(j: Interval, n: int):
    """Candidate n-interval patterns inside the base interval j."""
    w = j.length
    # odd pieces of a (2n-1)-fold equal subdivision
    step = w / (2 * n - 1)
    yield tuple(
        Interval(j.lo + 2 * i * step, j.lo + (2 * i + 1) * step) for i in range(n)
    )
    # n near-laps with shrinking margins; several scales, both orientations
    for scale in (1, 4, 16):
        alpha = w / (2 * n**2 * scale)
        lap = w / n
        for beta in (alpha, alpha / (4 * n), w / (4 * n**3 * scale)):
            delta = min(alpha, beta) / (2 * n)
            ivs = []
            ok = True
            for i in range(n):
                lo = j.lo + i * lap + (alpha if i == 0 else delta)
                hi = j.lo + (i + 1) * lap - (beta if i == n - 1 else delta)
                if lo >= hi:
                    ok = False
                    break
                ivs.append(Interval(lo, hi))
            if ok:
                yield tuple(ivs)
                yield tuple(
                    Interval(j.lo + (j.hi - iv.hi), j.lo + (j.hi - iv.lo))
                    for iv in reversed(ivs)
                )


def _base_intervals(rel: PLRelation) -> list[Interval]:
    points = set()
    for arc in rel.arcs:
        points.add(arc.dom.lo)
        points.add(arc.dom.hi)
        if arc.kind != "ver":
            points.update(x for x, _ in arc.homeo.breakpoints)
    pts = sorted(points)
    bases = [Interval(pts[0], pts[-1])]
    if len(pts) <= 42:
        for a, b in combinations(pts, 2):
            iv = Interval(a, b)
            if not iv.is_point() and iv not in bases:
                bases.append(iv)
    bases.sort(key=lambda iv: -iv.length)
    return bases


def find_horseshoe(rel: PLRelation, n: int) -> Optional[HorseshoeCert]:
    """Search for an n-horseshoe of the relation (n >= 2).

    Candidate interval patterns are generated inside structurally meaningful
    base intervals; every candidate is verified exactly, so a returned
    certificate is always sound.  None means the search failed, not that no
    horseshoe exists.
    """
    if n < 2:
        raise ValueError("a horseshoe needs at least 2 intervals")
    for base in _base_intervals(rel):
        for pattern in _subdivision_patterns(base, n):
            if verify_horseshoe(rel, pattern):
                return HorseshoeCert(tuple(pattern))
    return None


@dataclass(frozen=True)
class IterateBound:
    k: int
    n: int
    bound: float  # (1/k) log n
    cert: HorseshoeCert


def iterate_horseshoe_bound(
    rel: PLRelation,
    k_max: int,
    power: Callable[[int], PLRelation] | None = None,
    candidates: Callable[[int], Sequence[int]] | None = None,
) -> list[IterateBound]:
    """Certified lower bounds (1/k) log N_k from horseshoes of the k-th
    composition power.

    `power` overrides how powers are formed (e.g. parameterized graphs of
    iterated maps when the pair strongly commutes).  `candidates` supplies
    horseshoe sizes to try at each k; by default sizes are probed downward
    from half the arc count.
    """
    out = []
    for k in range(1, k_max + 1):
        rk = power(k) if power is not None else rel_power(rel, k)
        if candidates is not None:
            sizes = list(candidates(k))
        else:
            top = (len(rk.arcs) + 1) // 2 + 1
            sizes = list(range(top, 1, -1))
        for n in sizes:
            if n < 2:
                continue
            cert = find_horseshoe(rk, n)
            if cert is not None:
                out.append(IterateBound(k, n, math.log(n) / k, cert))
                break
    return out


# ---------------------------------------------------------------------------
# the bracket pipeline


@dataclass(frozen=True)
class BracketReport:
    n: int
    m: int
    target: float  # log max(n, m)
    lower: tuple[tuple[int, float], ...]  # (k, certified lower bound)
    upper: tuple[tuple[int, float], ...]  # (k, branch-count upper bound)
    counts: tuple[tuple[int, int], ...]  # (k, |family_k|)
    certs: tuple[IterateBound, ...]


def bracket_theorem_main(
    n: int,
    m: int,
    k_max: int,
    cap_arcs: int | None = None,
) -> BracketReport:
    """Squeeze the entropy of the curve {(T_m(t), T_n(t))} around log max(n,m).

    Lower bounds come from exactly verified floor((max^k + 1)/2)-horseshoes
    of the iterated curve; upper bounds from deduplicated branch counts.
    The two must bracket the target with the (log(k+1))/k gap at every k.
    """
    if math.gcd(n, m) != 1:
        raise CompositionError("tent parameters must be coprime")
    from .families import tent  # local import to avoid a cycle

    f, g = tent(m), tent(n)
    if not strongly_commutes(f, g):
        raise CompositionError("tent pair unexpectedly fails strong commutation")
    big = max(n, m)
    target = math.log(big)

    def power(k: int) -> PLRelation:
        return param_graph(iterate(f, k), iterate(g, k))

    certs = iterate_horseshoe_bound(
        None, k_max, power=power, candidates=lambda k: [(big**k + 1) // 2]
    )
    if len(certs) != k_max:
        raise AssertionError("horseshoe certification failed at some level")
    rows = branch_counts(f, g, k_max, cap_arcs=cap_arcs)
    lower = tuple((c.k, c.bound) for c in certs)
    upper = tuple((k, h) for k, _cnt, h in rows)
    counts = tuple((k, cnt) for k, cnt, _h in rows)
    for (k, lo), (_, hi) in zip(lower, upper):
        if not (lo <= target + 1e-12 and target <= hi + 1e-12):
            raise AssertionError(f"bracket violated at k={k}: {lo} .. {target} .. {hi}")
        if hi > target + math.log(k + 1) / k + 1e-12:
            raise AssertionError(f"upper bound misses the (log(k+1))/k gap at k={k}")
    return BracketReport(n, m, target, lower, upper, counts, tuple(certs))
