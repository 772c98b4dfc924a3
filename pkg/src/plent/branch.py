"""Branch families: monotone arcs of iterated set-valued compositions.

For a pair of onto maps f, g the level-1 family is the arc decomposition
of the parameterized curve {(f(t), g(t))}.  Level k+1 arises by chaining a
level-1 arc through a level-k arc wherever range and domain overlap with
nonempty interior.  Arcs are deduplicated by canonical form (as point
sets) before counting, so the family size is a geometric invariant.
"""

from __future__ import annotations

import gc
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InvalidFamilyError, ResourceError, UnsupportedRelationError
from .plmap import Interval, PLMap, UNIT, compose
from .relation import INC, DEC, MonotoneArc, PLRelation, param_graph

try:  # exact rationals an order of magnitude faster than Fraction
    from gmpy2 import mpq as _fastq
except ImportError:  # pragma: no cover - stdlib fallback
    _fastq = Fraction


def _frac(q) -> Fraction:
    """Fraction from an already-normalized rational, skipping the gcd."""
    f = Fraction.__new__(Fraction)
    f._numerator = int(q.numerator)
    f._denominator = int(q.denominator)
    return f


@dataclass(frozen=True)
class Branch:
    """A strictly monotone arc together with how it was produced.

    ``provenance`` is None at level 1, else the pair (i, j): this branch is
    the chain of level-1 branch i through level-k branch j.
    """

    arc: MonotoneArc
    provenance: Optional[tuple[int, int]] = None

    @property
    def dom(self) -> Interval:
        return self.arc.dom

    @property
    def ran(self) -> Interval:
        return self.arc.ran


@dataclass(frozen=True)
class BranchFamily:
    level: int
    branches: tuple[Branch, ...]

    def __len__(self) -> int:
        return len(self.branches)

    def relation(self) -> PLRelation:
        return PLRelation([b.arc for b in self.branches])


def initial_branches(f: PLMap, g: PLMap) -> BranchFamily:
    """Level-1 family: the monotone arcs of {(f(t), g(t))}.

    Only strict arcs are representable as branches, so maps producing
    plateaus or verticals in the curve are rejected.  Callers are expected
    to have checked strong commutation when they rely on the level-k
    family equalling the k-fold composition.
    """
    if f.range != UNIT or g.range != UNIT:
        raise InvalidFamilyError("branch families need onto maps of [0,1]")
    rel = param_graph(f, g)
    branches = []
    for arc in rel.arcs:
        if arc.kind not in (INC, DEC):
            raise InvalidFamilyError(
                "parameterized curve has a flat or vertical arc; "
                "no branch family exists"
            )
        branches.append(Branch(arc))
    return BranchFamily(1, tuple(branches))


def chain(a: Branch, b: Branch, provenance=None) -> Optional[Branch]:
    """Chain branch a through branch b where ran(a) meets dom(b) with
    nonempty interior; None when the overlap is empty or a point."""
    z = a.ran.intersect(b.dom)
    if z is None or z.is_point():
        return None
    ha, hb = a.arc.homeo, b.arc.homeo
    if len(ha.breakpoints) == 2 and len(hb.breakpoints) == 2:
        # affine-through-affine chains reduce to pure rational arithmetic,
        # which dominates the runtime of large tent-map families
        (xa0, ya0), (xa1, ya1) = ha.breakpoints
        slope_a = (ya1 - ya0) / (xa1 - xa0)
        u = xa0 + (z.lo - ya0) / slope_a
        v = xa0 + (z.hi - ya0) / slope_a
        lo, hi = (u, v) if u <= v else (v, u)
        (xb0, yb0), (xb1, yb1) = hb.breakpoints
        slope_b = (yb1 - yb0) / (xb1 - xb0)
        za, zb = (z.lo, z.hi) if slope_a > 0 else (z.hi, z.lo)
        homeo = PLMap(
            [(lo, yb0 + slope_b * (za - xb0)), (hi, yb0 + slope_b * (zb - xb0))]
        )
        return Branch(MonotoneArc.from_map(homeo), provenance)
    inv = a.arc.homeo.inverse()
    xa, xb = inv(z.lo), inv(z.hi)
    lo, hi = min(xa, xb), max(xa, xb)
    piece_a = a.arc.homeo.restrict(lo, hi)
    homeo = compose(b.arc.homeo.restrict(z.lo, z.hi), piece_a)
    return Branch(MonotoneArc.from_map(homeo), provenance)


def _affine_endpoints(b: Branch):
    pts = b.arc.homeo.breakpoints
    if len(pts) != 2:
        return None
    (x0, y0), (x1, y1) = pts
    return (_fastq(x0), _fastq(x1), _fastq(y0), _fastq(y1))


def _next_family_affine(
    base: BranchFamily, fam: BranchFamily, cap_arcs: int | None
) -> BranchFamily:
    """Chain single-segment branches with raw rational arithmetic.

    Large tent-map families are entirely affine; skipping the generic
    PLMap compose/restrict machinery per chain cuts the runtime of deep
    levels by roughly an order of magnitude.
    """
    one = _fastq(1)
    lefts = []
    for i, a in enumerate(base.branches):
        alo, ahi, ya_lo, ya_hi = _affine_endpoints(a)
        inv_a = (ahi - alo) / (ya_hi - ya_lo)
        rlo, rhi = (ya_lo, ya_hi) if ya_lo <= ya_hi else (ya_hi, ya_lo)
        full = rlo <= 0 and rhi >= one  # covers every possible domain
        lefts.append((i, alo, ya_lo, inv_a, inv_a > 0, rlo, rhi, full))
    out: dict = {}
    gc_was_on = gc.isenabled()
    gc.disable()
    try:
        for j, b in enumerate(fam.branches):
            blo, bhi, yb_lo, yb_hi = _affine_endpoints(b)
            slope_b = (yb_hi - yb_lo) / (bhi - blo)
            for i, alo, ya_lo, inv_a, inc_a, rlo, rhi, full in lefts:
                if full:
                    zlo, zhi, y0, y1 = blo, bhi, yb_lo, yb_hi
                else:
                    zlo = rlo if rlo > blo else blo
                    zhi = rhi if rhi < bhi else bhi
                    if zlo >= zhi:
                        continue
                    y0 = yb_lo if zlo == blo else yb_lo + slope_b * (zlo - blo)
                    y1 = yb_hi if zhi == bhi else yb_lo + slope_b * (zhi - blo)
                u = alo + (zlo - ya_lo) * inv_a
                v = alo + (zhi - ya_lo) * inv_a
                key = (u, v, y0, y1) if inc_a else (v, u, y1, y0)
                if key not in out:
                    out[key] = (i, j)
            if cap_arcs is not None and len(out) > cap_arcs and j % 64 == 0:
                break
    finally:
        if gc_was_on:
            gc.enable()
    branches = []
    for (lo, hi, y0, y1), prov in out.items():
        pts = ((_frac(lo), _frac(y0)), (_frac(hi), _frac(y1)))
        homeo = PLMap._from_canonical(pts)
        arc = MonotoneArc._trusted(INC if y1 > y0 else DEC, homeo)
        branches.append(Branch(arc, prov))
    result = BranchFamily(fam.level + 1, tuple(branches))
    if cap_arcs is not None and len(branches) > cap_arcs:
        raise ResourceError(
            f"branch family exceeds cap of {cap_arcs} arcs", partial=result
        )
    return result


def next_family(
    base: BranchFamily, fam: BranchFamily, cap_arcs: int | None = None
) -> BranchFamily:
    """Level k+1 from the level-1 and level-k families, deduplicated."""
    if base.level != 1:
        raise InvalidFamilyError("first argument must be the level-1 family")
    if all(
        len(b.arc.homeo.breakpoints) == 2
        for b in base.branches + fam.branches
    ):
        return _next_family_affine(base, fam, cap_arcs)
    out: dict = {}
    for i, a in enumerate(base.branches):
        for j, b in enumerate(fam.branches):
            c = chain(a, b, provenance=(i, j))
            if c is not None:
                out.setdefault(c.arc.key(), c)
        if cap_arcs is not None and len(out) > cap_arcs:
            raise ResourceError(
                f"branch family exceeds cap of {cap_arcs} arcs",
                partial=BranchFamily(fam.level + 1, tuple(out.values())),
            )
    return BranchFamily(fam.level + 1, tuple(out.values()))


def branch_families(
    f: PLMap, g: PLMap, k_max: int, cap_arcs: int | None = None
) -> list[BranchFamily]:
    fams = [initial_branches(f, g)]
    for _ in range(k_max - 1):
        fams.append(next_family(fams[0], fams[-1], cap_arcs=cap_arcs))
    return fams


def branch_counts(
    f: PLMap, g: PLMap, k_max: int, cap_arcs: int | None = None
) -> list[tuple[int, int, float]]:
    """Rows (k, |family_k|, log|family_k| / k) for k = 1..k_max.

    Checks the combinatorial ceiling |family_k| <= (k+1) * n^k, where n is
    the larger lap count; a violation means the recursion is broken, so it
    raises rather than returning bad data.
    """
    n = max(f.lap_count(), g.lap_count())
    rows = []
    for fam in branch_families(f, g, k_max, cap_arcs=cap_arcs):
        count = len(fam)
        if count > (fam.level + 1) * n**fam.level:
            raise AssertionError(
                f"branch count {count} at level {fam.level} exceeds "
                f"({fam.level}+1)*{n}^{fam.level}"
            )
        rows.append((fam.level, count, math.log(count) / fam.level))
    return rows


def fiber_cardinality(fam: BranchFamily, z: Fraction) -> int:
    """Number of distinct points of the family's relation over x = z."""
    values = set()
    for b in fam.branches:
        if b.dom.contains(z):
            values.add(b.arc.homeo(z))
    return len(values)


def interleave_check(f: PLMap, g: PLMap, strict: bool = True) -> bool:
    """Whether the critical points of f fall strictly between consecutive
    critical points of g in the proportional pattern i = floor(n*j/m),
    n, m the lap counts of g, f (requires n > m)."""
    m, n = f.lap_count(), g.lap_count()
    if n <= m:
        raise ValueError("second map must have strictly more laps")
    cf = f.critical_points()
    cg = [Fraction(0)] + g.critical_points() + [Fraction(1)]
    if set(cf) & set(cg[1:-1]):
        return False
    for j, t_hat in enumerate(cf, start=1):
        i = (n * j) // m
        if not (cg[i] < t_hat < cg[i + 1] if strict else cg[i] <= t_hat <= cg[i + 1]):
            return False
    return True
