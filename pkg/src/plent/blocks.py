"""Per-block entropy analysis of dyadic-block diagonal systems.

The block-assembled pairs (f_k, g_k) act independently on each dyadic
block B_i, so the coordinate relation psi_k = g_k o f_k^{-1} decomposes
blockwise.  Each block is rescaled to [0,1] and analyzed on its own:
certified lower bounds come from an exact constant-slope certificate when
the block relation is a single-valued map of constant absolute slope, or
from an exactly verified horseshoe otherwise; upper bounds come from
deduplicated branch counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .branch import branch_counts
from .entropy import HorseshoeCert, find_horseshoe
from .families import appendix_pair, block_interval
from .invlim import DiagonalSystem
from .plmap import Interval, PLMap, RatLike, as_rat, constant_slope
from .relation import PLRelation, param_graph


def appendix_system(n_seq: Sequence[int], s: RatLike) -> DiagonalSystem:
    """The diagonal system with bonding f_i and diagonal g_i from the
    block-assembled pairs; valid to depth len(n_seq)."""
    pairs = [appendix_pair(k, n_seq, s, _check=False) for k in range(1, len(n_seq) + 1)]
    return DiagonalSystem.from_pairs(pairs)


def unit_copy(f: PLMap, block: Interval) -> PLMap:
    """The restriction of f to an invariant block, rescaled to [0,1]."""
    piece = f.restrict(block.lo, block.hi)
    if not block.contains_interval(piece.range):
        raise ValueError(f"{block} is not invariant under the map")
    w = block.length
    return PLMap([((x - block.lo) / w, (y - block.lo) / w) for x, y in piece.breakpoints])


@dataclass(frozen=True)
class BlockRow:
    block: int
    interval: Interval
    lower: float
    lower_kind: str  # "constant-slope" | "horseshoe" | "none"
    upper: float  # (1/k_b) log |M_(k_b)| on the block
    k_branch: int
    cert: Optional[HorseshoeCert]


@dataclass(frozen=True)
class LevelReport:
    k: int
    n_k: int
    rows: tuple[BlockRow, ...]

    @property
    def lower(self) -> float:
        return max(r.lower for r in self.rows)

    @property
    def upper(self) -> float:
        return max(r.upper for r in self.rows)


def _block_lower(
    fb: PLMap, gb: PLMap, rel: PLRelation, horseshoe_n: Optional[int]
) -> tuple[float, str, Optional[HorseshoeCert]]:
    if fb.is_strictly_monotone():
        # single-valued block: g o f^{-1} is an honest PL map
        from .plmap import compose

        m = compose(gb, fb.inverse())
        s = constant_slope(m)
        if s is not None and s >= 1:
            return math.log(s) if s > 1 else 0.0, "constant-slope", None
    if horseshoe_n is not None and horseshoe_n >= 2:
        cert = find_horseshoe(rel, horseshoe_n)
        if cert is not None:
            return cert.bound, "horseshoe", cert
    return 0.0, "none", None


def level_report(
    n_seq: Sequence[int], s: RatLike, k: int, k_branch: int = 5
) -> LevelReport:
    """Certified bounds for every block of psi_k = g_k o f_k^{-1}.

    The tent block (block k+1) is probed for a horseshoe of exactly
    n_seq[k-1] intervals; single-valued constant-slope blocks (in
    particular block 1, carrying the slope-s zigzag) get the exact log s
    certificate instead, since a strict horseshoe of a single-valued
    N-lap map certifies at best log(N-1) at any finite stage.
    """
    s = as_rat(s)
    f_k, g_k = appendix_pair(k, n_seq, s, _check=False)
    n_k = n_seq[k - 1]
    rows = []
    for i in range(1, k + 3):
        blk = block_interval(i)
        fb = unit_copy(f_k, blk)
        gb = unit_copy(g_k, blk)
        rel = param_graph(fb, gb)
        horseshoe_n = n_k if i == k + 1 else None
        lower, kind, cert = _block_lower(fb, gb, rel, horseshoe_n)
        counts = branch_counts(fb, gb, k_branch)
        kb, _cnt, upper = counts[-1]
        rows.append(BlockRow(i, blk, lower, kind, upper, kb, cert))
    return LevelReport(k, n_k, tuple(rows))
