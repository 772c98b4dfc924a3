"""Truncated inverse limits and diagonal maps.

A truncated point of depth d is a tuple (x_0, ..., x_d) with
f_i(x_i) = x_{i-1} for the bonding maps f_i.  A diagonal system adds maps
g_i satisfying g_i o f_{i+1} = f_i o g_{i+1}; the induced diagonal map
drops one coordinate per application:

    Psi(x)_i = g_{i+1}(x_{i+1}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import CompositionError, DepthExhaustedError, LiftingError
from .plmap import PLMap, as_rat, compose, map_equals
from .relation import PLRelation, param_graph
from .entropy import separated_count


@dataclass(frozen=True)
class TruncatedPoint:
    coords: tuple[Fraction, ...]  # (x_0, ..., x_depth)

    @property
    def depth(self) -> int:
        return len(self.coords) - 1

    def __post_init__(self):
        if not self.coords:
            raise ValueError("a truncated point needs at least coordinate x_0")


class DiagonalSystem:
    """Bonding maps f_i and diagonal maps g_i, both indexed from 1."""

    def __init__(
        self,
        bonding: Callable[[int], PLMap],
        diagonal_maps: Callable[[int], PLMap],
        shift_like: bool = False,
    ):
        self.bonding = bonding
        self.diagonal_maps = diagonal_maps
        # shift-like systems act as (x_0, ..., x_d) -> (f(x_0), x_0, ...,
        # x_{d-1}): the diagonal image's deepest coordinate is already
        # determined, so applying the map does not lose depth
        self.shift_like = shift_like

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(f: PLMap, g: PLMap) -> "DiagonalSystem":
        return DiagonalSystem(lambda i: f, lambda i: g)

    @staticmethod
    def shift(f: PLMap) -> "DiagonalSystem":
        """The natural-extension shift on the inverse limit with constant
        bonding map f.  As a diagonal system the maps are g_i = f o f
        (one application moves every thread one step along f); the image's
        deepest coordinate equals the old x_{depth-1}, so truncated points
        keep their depth."""
        return DiagonalSystem(lambda i: f, lambda i: compose(f, f), shift_like=True)

    @staticmethod
    def from_pairs(pairs: Sequence[tuple[PLMap, PLMap]]) -> "DiagonalSystem":
        """Finite data (f_1, g_1), ..., (f_n, g_n); the last pair repeats."""

        def pick(seq_index: int) -> tuple[PLMap, PLMap]:
            return pairs[min(seq_index, len(pairs)) - 1]

        return DiagonalSystem(lambda i: pick(i)[0], lambda i: pick(i)[1])

    # -- structure ----------------------------------------------------------

    def validate_point(self, p: TruncatedPoint) -> None:
        for i in range(1, p.depth + 1):
            if self.bonding(i)(p.coords[i]) != p.coords[i - 1]:
                raise CompositionError(
                    f"bonding inconsistency at level {i}: "
                    f"f_{i}({p.coords[i]}) != {p.coords[i - 1]}"
                )

    def point_from_tip(self, depth: int, tip: Fraction) -> TruncatedPoint:
        """Depth-d point determined by its deepest coordinate."""
        coords = [as_rat(tip)]
        for i in range(depth, 0, -1):
            coords.append(self.bonding(i)(coords[-1]))
        return TruncatedPoint(tuple(reversed(coords)))


def check_diagonal_compat(sys: DiagonalSystem, depth: int) -> bool:
    return first_incompatible_level(sys, depth) is None


def first_incompatible_level(sys: DiagonalSystem, depth: int) -> Optional[int]:
    """Smallest i <= depth with g_i o f_{i+1} != f_i o g_{i+1}, else None."""
    for i in range(1, depth + 1):
        lhs = compose(sys.diagonal_maps(i), sys.bonding(i + 1))
        rhs = compose(sys.bonding(i), sys.diagonal_maps(i + 1))
        if not map_equals(lhs, rhs):
            return i
    return None


def psi_component(sys: DiagonalSystem, i: int) -> PLRelation:
    """The set-valued coordinate action at level i: the curve
    {(f_{i+1}(t), g_{i+1}(t))}, i.e. g_{i+1} o f_{i+1}^{-1}."""
    return param_graph(sys.bonding(i + 1), sys.diagonal_maps(i + 1))


def apply_diagonal(sys: DiagonalSystem, p: TruncatedPoint) -> TruncatedPoint:
    """One step of the diagonal map, with bonding consistency re-verified
    exactly.  Generic systems lose one level per application; shift-like
    systems keep their depth because the image's deepest coordinate is the
    old next-to-deepest one."""
    if p.depth == 0:
        raise DepthExhaustedError("cannot apply the diagonal map at depth 0")
    coords = tuple(
        sys.diagonal_maps(i + 1)(p.coords[i + 1]) for i in range(p.depth)
    )
    if sys.shift_like:
        coords = coords + (p.coords[p.depth - 1],)
    out = TruncatedPoint(coords)
    sys.validate_point(out)
    return out


def truncated_metric(
    p: TruncatedPoint, q: TruncatedPoint
) -> tuple[Fraction, Fraction]:
    """Exact distance sum |x_i - y_i| / 2^i over shared depth, plus the
    2^-depth bound on what deeper coordinates could contribute."""
    if p.depth != q.depth:
        raise ValueError("points must have equal depth")
    dist = sum(
        abs(a - b) / Fraction(2**i) for i, (a, b) in enumerate(zip(p.coords, q.coords))
    )
    return dist, Fraction(1, 2**p.depth)


def _solve_pair(
    f: PLMap, g: PLMap, a: Fraction, b: Fraction
) -> Optional[Fraction]:
    """Smallest y with f(y) = a and g(y) = b, or None."""
    candidates = []
    for iv in f.preimage(a):
        if iv.is_point():
            if g(iv.lo) == b:
                candidates.append(iv.lo)
        else:
            sub = g.restrict(iv.lo, iv.hi)
            for jv in sub.preimage(b):
                candidates.append(jv.lo)
    return min(candidates) if candidates else None


def lift_orbit(
    sys: DiagonalSystem,
    level: int,
    orbit: Sequence[Fraction],
    depth: int,
) -> TruncatedPoint:
    """Lift an orbit of the level-`level` coordinate relation to a single
    truncated point whose diagonal iterates project onto it.

    orbit[k] must satisfy orbit[k+1] in g_{level+1}(f_{level+1}^{-1}(orbit[k])).
    The lift solves, diagonal by diagonal, f(y) = previous thread value and
    g(y) = next column value; when some cell has no solution the system
    cannot realize the orbit and a LiftingError reports the level at which
    the obstruction occurs.
    """
    orbit = [as_rat(x) for x in orbit]
    n = len(orbit)
    if n < 1:
        raise ValueError("empty orbit")
    need = level + n - 1
    if depth < need:
        raise ValueError(f"depth {depth} too shallow; need at least {need}")
    # rows[j][k] = coordinate at level `level + j` of the k-th iterate
    rows: list[list[Fraction]] = [list(orbit)]
    for j in range(1, n):
        prev = rows[j - 1]
        f = sys.bonding(level + j)
        g = sys.diagonal_maps(level + j)
        row = []
        for k in range(n - j):
            y = _solve_pair(f, g, prev[k], prev[k + 1])
            if y is None:
                raise LiftingError(
                    f"orbit step {k} cannot be lifted through level {level + j}: "
                    f"no y with f_{level + j}(y) = {prev[k]} and "
                    f"g_{level + j}(y) = {prev[k + 1]}",
                    level=level + j,
                )
            row.append(y)
        rows.append(row)
    # assemble the initial point: x_{level + j} = rows[j][0], push down to
    # x_0 through the bonding maps, extend upward by smallest preimages
    coords = [rows[j][0] for j in range(n)]
    for i in range(level, 0, -1):
        coords.insert(0, sys.bonding(i)(coords[0]))
    while len(coords) - 1 < depth:
        i = len(coords)
        pre = sys.bonding(i).preimage(coords[-1])
        if not pre:
            raise LiftingError(
                f"no preimage at level {i} while deepening the lift", level=i
            )
        coords.append(pre[0].lo)
    point = TruncatedPoint(tuple(coords))
    sys.validate_point(point)
    return point


@dataclass(frozen=True)
class DiagonalEstimateRow:
    n: int
    eps: Fraction
    s_count: int
    estimate: float
    tail_bound: Fraction


def entropy_estimate_diagonal(
    sys: DiagonalSystem,
    depth: int,
    n_max: int,
    eps: Fraction,
    grid: Fraction,
) -> list[DiagonalEstimateRow]:
    """Separated-orbit entropy estimates for the diagonal map.

    Initial points are grid-generated: the deepest coordinate runs over
    the grid and is pushed forward through the bonding maps.  Shift-like
    systems start at the given depth; generic systems start at depth
    depth + n_max - 1, so that after n_max - 1 applications every iterate
    still has `depth` comparable coordinates.

    Two trajectories are separated when at some time step some one of the
    first `depth` coordinates differs by more than eps.  Coordinate-wise
    comparison gives a metric uniformly equivalent to the weighted-sum
    truncated metric, hence the same entropy, but does not damp deep
    coordinates by 2^-i, which at desk scale would blind the estimator to
    everything below coordinate ~log2(1/eps).  The ignored tail is bounded
    by 2^-depth, reported per row.
    """
    eps, grid = as_rat(eps), as_rat(grid)
    start_depth = depth if sys.shift_like else depth + n_max - 1
    tips = [k * grid for k in range(math.floor(1 / grid) + 1) if k * grid <= 1]
    trajectories = []
    for tip in tips:
        p = sys.point_from_tip(start_depth, tip)
        traj = [p]
        for _ in range(n_max - 1):
            p = apply_diagonal(sys, p)
            traj.append(p)
        trajectories.append(traj)

    def first_separation(ti, tj) -> Optional[int]:
        for step, (p, q) in enumerate(zip(ti, tj)):
            if any(
                abs(a - b) > eps
                for a, b in zip(p.coords[: depth + 1], q.coords[: depth + 1])
            ):
                return step
        return None

    m = len(trajectories)
    sep_step = {}
    for i in range(m):
        for j in range(i + 1, m):
            s = first_separation(trajectories[i], trajectories[j])
            if s is not None:
                sep_step[(i, j)] = s

    rows = []
    tail = Fraction(1, 2**depth)
    for n in range(1, n_max + 1):
        idx = list(range(m))

        def separated(a, b, _eps, n=n):
            i, j = (a[0], b[0]) if a[0] < b[0] else (b[0], a[0])
            s = sep_step.get((i, j))
            return s is not None and s < n

        count = separated_count([(i,) for i in idx], eps, separated=separated)
        rows.append(
            DiagonalEstimateRow(
                n, eps, count, math.log(count) / n if count > 1 else 0.0, tail
            )
        )
    return rows
