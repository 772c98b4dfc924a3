"""Set-valued relations on [0,1] given by finite unions of monotone arcs.

An arc is one of:

* ``inc``/``dec`` -- the graph of a strictly monotone PL homeomorphism
  between two nondegenerate subintervals,
* ``hor`` -- a horizontal segment (constant map over a nondegenerate
  domain interval),
* ``ver`` -- a vertical segment: a single x with a nondegenerate interval
  of y-values.

Two relations are equal when they are equal as subsets of the unit
square; ``rel_equals`` compares canonical segment decompositions, so the
particular arc decomposition does not matter.

Isolated points arising in constructions (e.g. degenerate overlaps during
composition) are outside this model and are dropped with a warning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import CompositionError, UnsupportedRelationError
from .plmap import (
    Interval,
    PLMap,
    RatLike,
    UNIT,
    as_rat,
    compose,
    map_equals,
    merge_intervals,
)

INC = "inc"
DEC = "dec"
HOR = "hor"
VER = "ver"


class IsolatedPointWarning(UserWarning):
    """A construction produced an isolated point, which was dropped."""


def _warn_point(x: Fraction, y: Fraction, context: str) -> None:
    warnings.warn(
        f"dropping isolated point ({x}, {y}) produced by {context}",
        IsolatedPointWarning,
        stacklevel=3,
    )


@dataclass(frozen=True)
class MonotoneArc:
    kind: str
    homeo: Optional[PLMap] = None  # inc / dec / hor
    x: Optional[Fraction] = None  # ver
    ys: Optional[Interval] = None  # ver

    def __post_init__(self):
        if self.kind in (INC, DEC, HOR):
            if self.homeo is None or self.x is not None or self.ys is not None:
                raise ValueError("non-vertical arcs are defined by a PL map only")
            signs = set(self.homeo.slope_signs())
            want = {INC: {1}, DEC: {-1}, HOR: {0}}[self.kind]
            if signs != want:
                raise ValueError(f"arc kind {self.kind} inconsistent with map slopes")
        elif self.kind == VER:
            if self.homeo is not None or self.x is None or self.ys is None:
                raise ValueError("vertical arcs need x and a y-interval")
            if self.ys.is_point():
                raise ValueError("vertical arc must have a nondegenerate y-interval")
        else:
            raise ValueError(f"unknown arc kind {self.kind!r}")

    @staticmethod
    def _trusted(kind: str, homeo: PLMap) -> "MonotoneArc":
        # fast path for callers that already know the arc kind; skips
        # the slope-sign consistency validation
        arc = object.__new__(MonotoneArc)
        object.__setattr__(arc, "kind", kind)
        object.__setattr__(arc, "homeo", homeo)
        object.__setattr__(arc, "x", None)
        object.__setattr__(arc, "ys", None)
        return arc

    @staticmethod
    def from_map(piece: PLMap) -> "MonotoneArc":
        signs = set(piece.slope_signs())
        if signs == {1}:
            return MonotoneArc(INC, homeo=piece)
        if signs == {-1}:
            return MonotoneArc(DEC, homeo=piece)
        if signs == {0}:
            return MonotoneArc(HOR, homeo=piece)
        raise ValueError("piece is not monotone of a single kind")

    @staticmethod
    def vertical(x: RatLike, ys: Interval) -> "MonotoneArc":
        return MonotoneArc(VER, x=as_rat(x), ys=ys)

    @property
    def dom(self) -> Interval:
        if self.kind == VER:
            return Interval(self.x, self.x)
        return self.homeo.domain

    @property
    def ran(self) -> Interval:
        if self.kind == VER:
            return self.ys
        return self.homeo.range

    def key(self):
        if self.kind == VER:
            return (VER, self.x, self.ys.lo, self.ys.hi)
        return (self.kind, self.homeo.breakpoints)

    def segments(self) -> list[tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]]:
        """The arc as straight 2-D segments between consecutive breakpoints."""
        if self.kind == VER:
            return [((self.x, self.ys.lo), (self.x, self.ys.hi))]
        bps = self.homeo.breakpoints
        return [(bps[i], bps[i + 1]) for i in range(len(bps) - 1)]

    def inverse(self) -> "MonotoneArc":
        if self.kind == VER:
            # vertical becomes the constant map ys -> x
            return MonotoneArc(
                HOR, homeo=PLMap([(self.ys.lo, self.x), (self.ys.hi, self.x)])
            )
        if self.kind == HOR:
            value = self.homeo.breakpoints[0][1]
            return MonotoneArc.vertical(value, self.homeo.domain)
        return MonotoneArc.from_map(self.homeo.inverse())

    def fiber(self, x: Fraction) -> Optional[Interval]:
        """The set of y with (x, y) on the arc, or None."""
        if self.kind == VER:
            return self.ys if x == self.x else None
        if self.dom.contains(x):
            y = self.homeo(x)
            return Interval(y, y)
        return None

    def image(self, xs: Interval) -> Optional[Interval]:
        """Image of {x in xs} under the arc, as an interval (or None)."""
        if self.kind == VER:
            return self.ys if xs.contains(self.x) else None
        sub = self.dom.intersect(xs)
        if sub is None:
            return None
        a, b = self.homeo(sub.lo), self.homeo(sub.hi)
        return Interval(min(a, b), max(a, b))


class PLRelation:
    """Finite union of monotone arcs, with set-level equality semantics."""

    __slots__ = ("arcs", "_canon")

    def __init__(self, arcs: Iterable[MonotoneArc]):
        seen = {}
        for arc in arcs:
            seen.setdefault(arc.key(), arc)
        ordered = sorted(
            seen.values(), key=lambda a: (a.dom.lo, a.dom.hi, a.ran.lo, a.ran.hi, a.kind)
        )
        if not ordered:
            raise ValueError("a relation needs at least one arc")
        object.__setattr__(self, "arcs", tuple(ordered))
        object.__setattr__(self, "_canon", None)

    def __setattr__(self, *a):
        raise AttributeError("PLRelation is immutable")

    def __repr__(self) -> str:
        return f"PLRelation({len(self.arcs)} arcs)"

    def canonical_segments(self):
        """The relation as a canonical set of maximal straight segments.

        Segments are grouped by the line they lie on and merged into
        maximal pieces, so this is a complete invariant of the point set.
        """
        canon = object.__getattribute__(self, "_canon")
        if canon is not None:
            return canon
        by_line: dict[tuple, list[Interval]] = {}
        for arc in self.arcs:
            for (px, py), (qx, qy) in arc.segments():
                if px == qx:
                    key = ("v", px)
                    span = Interval(min(py, qy), max(py, qy))
                else:
                    slope = (qy - py) / (qx - px)
                    key = ("s", slope, py - slope * px)
                    span = Interval(min(px, qx), max(px, qx))
                by_line.setdefault(key, []).append(span)
        canon = frozenset(
            (key, tuple(merge_intervals(spans))) for key, spans in by_line.items()
        )
        object.__setattr__(self, "_canon", canon)
        return canon


def rel_equals(r: PLRelation, s: PLRelation) -> bool:
    """Equality as subsets of the unit square."""
    return r.canonical_segments() == s.canonical_segments()


def rel_union(*relations: PLRelation) -> PLRelation:
    return PLRelation([arc for rel in relations for arc in rel.arcs])


def graph_of(f: PLMap) -> PLRelation:
    """The graph of a PL map, split into its monotone laps."""
    return PLRelation([MonotoneArc.from_map(lap) for lap in f.laps()])


def diagonal() -> PLRelation:
    return graph_of(PLMap([(0, 0), (1, 1)]))


def inverse_rel(rel: PLRelation) -> PLRelation:
    return PLRelation([arc.inverse() for arc in rel.arcs])


def param_graph(f: PLMap, g: PLMap) -> PLRelation:
    """The parameterized curve {(f(t), g(t)) : t in dom}.

    This equals the graph of g o f^{-1} as a point set whenever f is onto
    its range; the arcs come out already split into monotone pieces.
    """
    if f.domain != g.domain:
        raise CompositionError("parameterized graph needs maps with equal domains")
    cuts = sorted(set(f.lap_boundaries()) | set(g.lap_boundaries()))
    arcs: list[MonotoneArc] = []
    for t0, t1 in zip(cuts, cuts[1:]):
        fp = f.restrict(t0, t1)
        gp = g.restrict(t0, t1)
        if fp.is_constant():
            x0 = fp(t0)
            if gp.is_constant():
                _warn_point(x0, gp(t0), "a joint plateau in param_graph")
                continue
            arcs.append(MonotoneArc.vertical(x0, gp.range))
        else:
            arcs.append(MonotoneArc.from_map(compose(gp, fp.inverse())))
    return PLRelation(arcs)


def evaluate_at(rel: PLRelation, x: RatLike) -> list[Union[Fraction, Interval]]:
    """The fiber {y : (x, y) in rel} as points and/or intervals."""
    x = as_rat(x)
    pieces = [fib for arc in rel.arcs if (fib := arc.fiber(x)) is not None]
    out: list[Union[Fraction, Interval]] = []
    for iv in merge_intervals(pieces):
        out.append(iv.lo if iv.is_point() else iv)
    return out


def fiber_intervals(rel: PLRelation, x: RatLike) -> list[Interval]:
    """Like evaluate_at but uniformly as (possibly degenerate) intervals."""
    x = as_rat(x)
    return merge_intervals(
        fib for arc in rel.arcs if (fib := arc.fiber(x)) is not None
    )


def image_of_interval(rel: PLRelation, xs: Interval) -> list[Interval]:
    """Union of fibers over an interval of x-values."""
    return merge_intervals(
        img for arc in rel.arcs if (img := arc.image(xs)) is not None
    )


def _compose_pair(r: MonotoneArc, s: MonotoneArc) -> Optional[MonotoneArc]:
    """One arc of s o r, or None when the overlap is empty/degenerate."""
    if r.kind == VER:
        if s.kind == VER:
            if r.ys.contains(s.x):
                return MonotoneArc.vertical(r.x, s.ys)
            return None
        overlap = r.ys.intersect(s.dom)
        if overlap is None:
            return None
        out = s.image(overlap)
        if out is None or out.is_point():
            if out is not None:
                _warn_point(r.x, out.lo, "composing a vertical into a flat arc")
            return None
        return MonotoneArc.vertical(r.x, out)
    if r.kind == HOR:
        y0 = r.homeo.breakpoints[0][1]
        if s.kind == VER:
            if s.x == y0:
                raise UnsupportedRelationError(
                    "composition produces a full rectangle "
                    f"(horizontal at {y0} into vertical at {s.x}); "
                    "rectangle fibers are outside the finite-arc model"
                )
            return None
        if s.dom.contains(y0):
            value = s.homeo(y0)
            dom = r.homeo.domain
            return MonotoneArc(
                HOR, homeo=PLMap([(dom.lo, value), (dom.hi, value)])
            )
        return None
    # r strictly monotone
    if s.kind == VER:
        if r.ran.contains(s.x):
            x0 = r.homeo.inverse()(s.x)
            return MonotoneArc.vertical(x0, s.ys)
        return None
    overlap = r.ran.intersect(s.dom)
    if overlap is None or overlap.is_point():
        if overlap is not None:
            x0 = r.homeo.inverse()(overlap.lo)
            _warn_point(x0, s.homeo(overlap.lo), "a degenerate range/domain overlap")
        return None
    rinv = r.homeo.inverse()
    xa, xb = rinv(overlap.lo), rinv(overlap.hi)
    rp = r.homeo.restrict(min(xa, xb), max(xa, xb))
    return MonotoneArc.from_map(compose(s.homeo.restrict(overlap.lo, overlap.hi), rp))


def compose_rel(s: PLRelation, r: PLRelation) -> PLRelation:
    """The relation s o r = {(x, z) : exists y, (x,y) in r and (y,z) in s}."""
    arcs = []
    for ra in r.arcs:
        for sa in s.arcs:
            arc = _compose_pair(ra, sa)
            if arc is not None:
                arcs.append(arc)
    if not arcs:
        raise CompositionError("composition of relations is empty")
    return PLRelation(arcs)


def rel_power(rel: PLRelation, k: int) -> PLRelation:
    if k < 1:
        raise ValueError("k must be >= 1")
    acc = rel
    for _ in range(k - 1):
        acc = compose_rel(rel, acc)
    return acc


def restrict_rel(rel: PLRelation, box: Interval) -> PLRelation:
    """The relation intersected with box x box."""
    arcs = []
    for arc in rel.arcs:
        if arc.kind == VER:
            if box.contains(arc.x):
                ys = arc.ys.intersect(box)
                if ys is not None and not ys.is_point():
                    arcs.append(MonotoneArc.vertical(arc.x, ys))
            continue
        dom = arc.dom.intersect(box)
        if dom is None or dom.is_point():
            continue
        piece = arc.homeo.restrict(dom.lo, dom.hi)
        ran = piece.range.intersect(box)
        if ran is None:
            continue
        if arc.kind == HOR:
            arcs.append(MonotoneArc.from_map(piece))
            continue
        inv = piece.inverse()
        xa, xb = inv(ran.lo), inv(ran.hi)
        lo, hi = min(xa, xb), max(xa, xb)
        if lo == hi:
            continue
        arcs.append(MonotoneArc.from_map(piece.restrict(lo, hi)))
    return PLRelation(arcs)


def rescale_rel(rel: PLRelation, box: Interval) -> PLRelation:
    """Conjugate the restriction of rel to box x box by the affine map
    sending box onto [0,1] (both coordinates)."""
    if box.is_point():
        raise ValueError("cannot rescale a degenerate box")
    inner = restrict_rel(rel, box)
    w = box.length

    def t(v: Fraction) -> Fraction:
        return (v - box.lo) / w

    arcs = []
    for arc in inner.arcs:
        if arc.kind == VER:
            arcs.append(
                MonotoneArc.vertical(t(arc.x), Interval(t(arc.ys.lo), t(arc.ys.hi)))
            )
        else:
            arcs.append(
                MonotoneArc.from_map(
                    PLMap([(t(x), t(y)) for x, y in arc.homeo.breakpoints])
                )
            )
    return PLRelation(arcs)


def commutes(f: PLMap, g: PLMap) -> bool:
    """Exact equality f o g = g o f."""
    return map_equals(compose(f, g), compose(g, f))


def strong_commutation_relations(
    f: PLMap, g: PLMap
) -> tuple[bool, PLRelation, PLRelation]:
    """Compare g o f^{-1} with f^{-1} o g as relations.

    Returns (equal, g o f^{-1}, f^{-1} o g); the two relations serve as the
    witness when they differ.
    """
    finv = inverse_rel(graph_of(f))
    lhs = compose_rel(graph_of(g), finv)
    rhs = compose_rel(finv, graph_of(g))
    return rel_equals(lhs, rhs), lhs, rhs


def strongly_commutes(f: PLMap, g: PLMap) -> bool:
    return strong_commutation_relations(f, g)[0]
