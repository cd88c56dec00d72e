"""Rational-anchor cube families and dimension machinery.

Enumeration of the level-j anchored cube families, covering-exponent
regression, membership tests for the two-sided approximation set, the
Dirichlet approximation theorem, greedy separated-cube packings, nested
Cantor-type constructions, and the mass-distribution dimension bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .counterexample import CounterexampleParams
from .measures import exponent_fit

_SCAN_CHUNK = 1 << 20


@dataclass(frozen=True)
class Cube:
    """Axis-aligned closed cube anchored at the rational p/q.

    Each coordinate spans [p_i/q + lo, p_i/q + hi]; a centered ball of
    radius r is the case lo = -r, hi = r.  Coordinates live in the unit
    torus [0, 1]^d (cycle units; multiply by 2 pi for radians).
    """

    p: tuple[int, ...]
    q: int
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError("anchor denominator must be positive")
        if not self.lo < self.hi:
            raise ValueError("cube needs lo < hi")

    @property
    def d(self) -> int:
        return len(self.p)

    @property
    def side(self) -> Fraction:
        return self.hi - self.lo

    @property
    def side_radians(self) -> float:
        return 2.0 * math.pi * float(self.side)

    def anchor(self, i: int) -> Fraction:
        return Fraction(self.p[i], self.q)

    def lo_corner(self, i: int) -> Fraction:
        return self.anchor(i) + self.lo

    def hi_corner(self, i: int) -> Fraction:
        return self.anchor(i) + self.hi

    def contains_anchor(self, p: tuple[int, ...], q: int, margin: Fraction) -> bool:
        """Anchor p/q at distance >= margin from this cube's complement."""
        for i in range(self.d):
            a = Fraction(p[i], q)
            if a < self.lo_corner(i) + margin or a > self.hi_corner(i) - margin:
                return False
        return True


@dataclass
class CubeFamily:
    """Finite cube family at one generation level, with provenance."""

    level: int
    cubes: list[Cube]
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)


def _even_count(q: int) -> int:
    """Number of even integers in the closed window [q/4, q/2]."""
    return q // 4 - (q + 7) // 8 + 1


def level_cube_count(params: CounterexampleParams, j: int) -> int:
    """Exact cube count of the level-j cube family, without materializing it."""
    top = float(params.lam) ** (j / params.tau)
    lo = int(math.ceil(params.kappa * top - 1e-9))
    hi = int(math.floor(top + 1e-9))
    total = 0
    for q in range(max(4, lo + (-lo) % 4 if lo % 4 else lo), hi + 1, 4):
        e = _even_count(q)
        if e > 0:
            total += e**params.d
    return total


def level_cube_family(
    params: CounterexampleParams, j: int, cap: int = 1 << 20
) -> CubeFamily:
    """Enumerate every cube p/q + [c1 lam^-j, c2 lam^-j]^d of level j.

    Anchors have q = 0 (mod 4) in the level window and even p_i in
    [q/4, q/2]; offsets are exact rationals, so corner inequalities can be
    audited in exact arithmetic.
    """
    count = level_cube_count(params, j)
    if count > cap:
        raise ValueError(f"level-{j} family holds {count} cubes, above the cap {cap}")
    top = float(params.lam) ** (j / params.tau)
    lo_q = int(math.ceil(params.kappa * top - 1e-9))
    hi_q = int(math.floor(top + 1e-9))
    scale = Fraction(1, params.lam**j)
    off_lo, off_hi = params.c1 * scale, params.c2 * scale
    cubes = []
    for q in range(max(4, lo_q + (-lo_q) % 4 if lo_q % 4 else lo_q), hi_q + 1, 4):
        lo_p = -((-q) // 4)
        evens = range(lo_p + lo_p % 2, q // 2 + 1, 2)
        for p in product(evens, repeat=params.d):
            cubes.append(Cube(p, q, off_lo, off_hi))
    fam = CubeFamily(
        level=j,
        cubes=cubes,
        meta={
            "lam": params.lam,
            "q_window": (max(4, lo_q), hi_q),
            "parity": "q = 0 mod 4, p even in [q/4, q/2]",
        },
    )
    assert len(fam) == count
    return fam


def covering_exponent(
    families: Sequence[CubeFamily | tuple[int, int]],
    lam: int | None = None,
) -> tuple[float, float]:
    """Regression of ln(count) against level * ln(lam).

    Returns (slope, residual); the slope is the covering exponent of the
    generation sequence, (d+1)/tau for the anchored families.
    """
    pts = []
    for fam in families:
        if isinstance(fam, CubeFamily):
            level, count = fam.level, len(fam)
            lam = lam or fam.meta.get("lam")
        else:
            level, count = fam
        pts.append((level, count))
    if len(pts) < 3:
        raise ValueError("need at least 3 generation levels")
    if lam is None:
        raise ValueError("base lam is required (pass it or supply CubeFamily meta)")
    if any(c <= 0 for _, c in pts):
        raise ValueError("empty generations cannot enter the regression")
    fit = exponent_fit([(float(lam) ** level, count) for level, count in pts])
    return fit.slope, fit.residual


def membership_witnesses(
    x: Sequence[float],
    tau: float,
    c1: float,
    c2: float,
    q_max: int,
) -> list[tuple[tuple[int, ...], int]]:
    """All (p, q) with q <= q_max, p_i in (q/8, q/4), and
    c1/q^tau <= x_i - p_i/q <= c2/q^tau in every coordinate."""
    xv = [float(v) for v in x]
    if any(not 0.0 <= v <= 1.0 for v in xv):
        raise ValueError("membership test expects x in [0, 1]^d")
    out: list[tuple[tuple[int, ...], int]] = []
    for q in range(1, q_max + 1):
        qt = float(q) ** tau
        ranges = []
        for v in xv:
            lo = max(math.ceil(q * (v - c2 / qt) - 1e-12), math.floor(q / 8) + 1)
            hi = min(math.floor(q * (v - c1 / qt) + 1e-12), math.ceil(q / 4) - 1)
            ok = [
                p
                for p in range(lo, hi + 1)
                if 8 * p > q and 4 * p < q
                and c1 / qt - 1e-15 <= v - p / q <= c2 / qt + 1e-15
            ]
            if not ok:
                break
            ranges.append(ok)
        else:
            out.extend((tuple(combo), q) for combo in product(*ranges))
    return out


def dirichlet_approx(x: Sequence[float], n: int) -> tuple[tuple[int, ...], int]:
    """Simultaneous rational approximation with the pigeonhole guarantee.

    Returns (p, q) with 1 <= q <= n and |x - p/q|_inf <= 1/(q n^(1/d)),
    scanning q upward so the returned denominator is the minimal one that
    satisfies the bound with the rounded numerator.
    """
    xv = np.asarray(x, dtype=float).reshape(-1)
    if n < 1:
        raise ValueError("n must be a positive integer")
    d = xv.size
    bound_root = float(n) ** (1.0 / d)
    for q in range(1, n + 1):
        p = np.rint(q * xv)
        err = np.abs(xv - p / q).max()
        if err <= 1.0 / (q * bound_root) + 1e-15:
            return tuple(int(v) for v in p), q
    raise RuntimeError("pigeonhole guarantee failed; input out of range?")


def _to_fraction_power(q: int, tau) -> Fraction:
    """1/q^tau as an exact Fraction for integer tau, else the nearest float."""
    if isinstance(tau, int) or (isinstance(tau, Fraction) and tau.denominator == 1):
        return Fraction(1, q ** int(tau))
    return Fraction(float(q) ** (-float(tau)))


def _candidate_scan_1d(
    lo: Fraction, hi: Fraction, q_lo: int, q_hi: int
):
    """Yield anchors (p, q) with p/q in [lo, hi], ordered by (q, p).

    Chunked vectorized prefilter with exact integer verification, so large
    denominator windows stream without materializing empty ranges.
    """
    lo_f, hi_f = float(lo), float(hi)
    for start in range(q_lo, q_hi + 1, _SCAN_CHUNK):
        stop = min(start + _SCAN_CHUNK, q_hi + 1)
        qs = np.arange(start, stop, dtype=np.float64)
        # slack must cover the rounding of q*bound at large q; candidates
        # are verified exactly below, so only misses matter here
        slack = 1e-9 + np.abs(qs) * (abs(lo_f) + abs(hi_f)) * 1e-12
        p_lo = np.ceil(qs * lo_f - slack)
        p_hi = np.floor(qs * hi_f + slack)
        hits = np.nonzero(p_hi >= p_lo)[0]
        for i in hits:
            q = start + int(i)
            first = max(int(p_lo[i]) - 1, 0)
            last = int(p_hi[i]) + 1
            for p in range(first, last + 1):
                # exact verification: lo <= p/q <= hi
                if p * lo.denominator >= lo.numerator * q and p * hi.denominator <= hi.numerator * q:
                    yield p, q


def separated_cubes(
    c: Cube,
    n: int,
    tau,
    beta=4,
    max_cubes: int | None = None,
) -> CubeFamily:
    """Greedy separated family of balls B(p/q, 1/q^tau) inside the cube c.

    Anchors have q in [n/beta, n], sit at distance > (beta/n)^(1+1/d) from
    the complement of c, and are pairwise further than 3 (beta/n)^(1+1/d)
    apart; the cubes themselves are then separated by at least n^(-1-1/d).
    Greedy order is lexicographic in (q, p).  With max_cubes set the scan
    stops early, producing a valid (not necessarily maximal) family.
    """
    d = c.d
    beta = Fraction(beta)
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    q_lo = int(math.ceil(n / float(beta) - 1e-9))
    q_hi = n
    if q_lo > q_hi:
        raise ValueError(f"denominator window [{n}/{beta}, {n}] is empty")
    if d == 1:
        margin = (beta / n) ** 2
    else:
        margin = Fraction((float(beta) / n) ** (1.0 + 1.0 / d))
    gap = 3 * margin
    gap_f = float(gap)

    lo_b = [c.lo_corner(i) + margin for i in range(d)]
    hi_b = [c.hi_corner(i) - margin for i in range(d)]
    if any(l > h for l, h in zip(lo_b, hi_b)):
        raise ValueError("margin exceeds the cube; n is too small for the window")

    accepted: list[tuple[tuple[int, ...], int]] = []
    buckets: dict[tuple[int, ...], list[int]] = {}

    def bucket_key(p: tuple[int, ...], q: int) -> tuple[int, ...]:
        return tuple(int(p[i] / q / gap_f) for i in range(d))

    def separated(p: tuple[int, ...], q: int) -> bool:
        key = bucket_key(p, q)
        for nb in product(*[(k - 1, k, k + 1) for k in key]):
            for idx in buckets.get(nb, ()):
                p2, q2 = accepted[idx]
                close = True
                for i in range(d):
                    lhs = abs(p[i] * q2 - p2[i] * q) * gap.denominator
                    if lhs > gap.numerator * q * q2:
                        close = False
                        break
                if close:
                    return False
        return True

    def push(p: tuple[int, ...], q: int) -> None:
        accepted.append((p, q))
        buckets.setdefault(bucket_key(p, q), []).append(len(accepted) - 1)

    if d == 1:
        gen = _candidate_scan_1d(lo_b[0], hi_b[0], q_lo, q_hi)
        for p, q in gen:
            if separated((p,), q):
                push((p,), q)
                if max_cubes is not None and len(accepted) >= max_cubes:
                    break
    else:
        if q_hi > 1 << 14 and max_cubes is None:
            raise ValueError("full enumeration in d >= 2 is limited to n <= 2^14")
        done = False
        for q in range(q_lo, q_hi + 1):
            ranges = []
            for i in range(d):
                p0 = -((-(lo_b[i].numerator * q)) // lo_b[i].denominator)
                p1 = (hi_b[i].numerator * q) // hi_b[i].denominator
                ranges.append(range(p0, p1 + 1))
            for p in product(*ranges):
                if separated(p, q):
                    push(p, q)
                    if max_cubes is not None and len(accepted) >= max_cubes:
                        done = True
                        break
            if done:
                break

    cubes = [Cube(p, q, -_to_fraction_power(q, tau), _to_fraction_power(q, tau))
             for p, q in accepted]
    return CubeFamily(
        level=0,
        cubes=cubes,
        meta={
            "n": n,
            "beta": float(beta),
            "tau": float(tau),
            "margin": margin,
            "anchor_gap": gap,
            "cube_separation": float(n) ** (-1.0 - 1.0 / d),
            "count": len(cubes),
            "maximal": max_cubes is None,
        },
    )


def audit_separated_family(c: Cube, family: CubeFamily, tau) -> None:
    """Exact structural audit: containment with margin, pairwise anchor gap,
    and cube separation at least n^(-1-1/d); raises on any violation.

    In one dimension adjacent anchors in sorted order witness the minimum,
    so the audit is linear; higher dimensions scan all pairs.
    """
    n = family.meta["n"]
    margin: Fraction = family.meta["margin"]
    gap: Fraction = family.meta["anchor_gap"]
    d = c.d
    sep = Fraction(1, n ** (d + 1)) if d == 1 else Fraction(float(n) ** (-1 - 1 / d))
    for cube in family:
        if not c.contains_anchor(cube.p, cube.q, margin):
            raise AssertionError(f"anchor {cube.p}/{cube.q} violates the margin")
        for i in range(d):
            if cube.lo_corner(i) < c.lo_corner(i) or cube.hi_corner(i) > c.hi_corner(i):
                raise AssertionError(f"cube at {cube.p}/{cube.q} leaves the parent")
    if d == 1:
        order = sorted(family.cubes, key=lambda cb: cb.anchor(0))
        pairs = zip(order, order[1:])
    else:
        cubes = family.cubes
        pairs = (
            (cubes[a], cubes[b])
            for a in range(len(cubes))
            for b in range(a + 1, len(cubes))
        )
    for ca, cb in pairs:
        dist = max(abs(ca.anchor(i) - cb.anchor(i)) for i in range(d))
        if dist <= gap:
            raise AssertionError(f"anchors {ca.p}/{ca.q} and {cb.p}/{cb.q} too close")
        if dist - ca.hi - cb.hi < sep:
            raise AssertionError("cube separation below the guarantee")


def audit_separated_maximal(c: Cube, n: int, tau, beta, family: CubeFamily) -> None:
    """Rescan every admissible anchor; each must clash with an accepted one.
    Only meaningful for families built without max_cubes."""
    margin: Fraction = family.meta["margin"]
    gap: Fraction = family.meta["anchor_gap"]
    accepted = {(cube.p, cube.q) for cube in family}
    d = c.d
    q_lo = int(math.ceil(n / float(beta) - 1e-9))
    lo_b = [c.lo_corner(i) + margin for i in range(d)]
    hi_b = [c.hi_corner(i) - margin for i in range(d)]
    if d != 1:
        raise NotImplementedError("maximality audit implemented for d = 1")
    for p, q in _candidate_scan_1d(lo_b[0], hi_b[0], q_lo, n):
        if ((p,), q) in accepted:
            continue
        clash = any(
            abs(p * cq - cp[0] * q) * gap.denominator <= gap.numerator * q * cq
            for cp, cq in accepted
        )
        if not clash:
            raise AssertionError(f"family is not maximal: {p}/{q} could be added")


@dataclass(frozen=True)
class CantorPlan:
    """Per-level data of a nested construction: denominators n_k, child
    counts m_k >= 2, and separations eps_k (strictly decreasing)."""

    d: int
    tau: float
    levels: int
    n: tuple[int, ...]
    m: tuple[int, ...]
    eps: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.n) == len(self.m) == len(self.eps) == self.levels):
            raise ValueError("per-level arrays must match the level count")
        if any(mk < 2 for mk in self.m):
            raise ValueError(f"every level needs m_k >= 2, got {self.m}")
        if any(e2 >= e1 for e1, e2 in zip(self.eps, self.eps[1:])):
            raise ValueError("separations must be strictly decreasing")
        if any(e <= 0 for e in self.eps):
            raise ValueError("separations must be positive")


def default_growth_rule(n_prev: int, k: int) -> int:
    """Per-level denominator growth, geometric with ratio 2^12.

    A fixed geometric ratio keeps every level computable at desk scale
    while satisfying the feasibility requirement that child margins fit
    inside parent cubes (ratio >> beta * sqrt(2/(c2-c1))).
    """
    return n_prev * 4096


def build_nested_levels(
    d: int,
    tau,
    n1: int,
    levels: int,
    growth: Callable[[int, int], int] | None = None,
    beta=4,
    c1: Fraction = Fraction(1, 200),
    c2: Fraction = Fraction(1, 100),
    max_children: int = 64,
    retain: int = 4,
    e0: Cube | None = None,
) -> tuple[list[CubeFamily], CantorPlan]:
    """Iterate the separated-cube step inside every retained parent cube.

    Level k runs the greedy packing with denominators up to n_k inside each
    (k-1)-level cube and replaces every ball by its offset twin
    p/q + [c1/q^tau, c2/q^tau]^d.  The plan records, per level, the child
    count m_k (min over expanded parents of children found, capped at
    max_children) and the separation eps_k (min over expanded parents of
    the exact within-parent child gap, never above eps_(k-1)); both are
    realized by the greedy runs.  Expansion to the next level proceeds
    under `retain` children per parent, spread across the parent, so the
    stored families stay small while the per-parent counts are certified
    wherever the construction actually descends.
    """
    if growth is None:
        growth = default_growth_rule
    if e0 is None:
        e0 = Cube((1,) * d, 8, Fraction(0), Fraction(1, 8))
    c1, c2 = Fraction(c1), Fraction(c2)
    if not 0 < c1 < c2 <= 1:
        raise ValueError("need 0 < c1 < c2 <= 1")
    parents = [e0]
    families: list[CubeFamily] = []
    ns: list[int] = []
    ms: list[int] = []
    eps: list[float] = []
    n_prev = n1
    for k in range(1, levels + 1):
        n_k = n1 if k == 1 else growth(n_prev, k)
        level_cubes: list[Cube] = []
        m_k = None
        gap_k = None
        for parent in parents:
            fam = separated_cubes(parent, n_k, tau, beta=beta, max_cubes=max_children)
            if len(fam) < 2:
                raise ValueError(
                    f"level {k}: parent at {parent.p}/{parent.q} yields {len(fam)} "
                    f"children; the growth condition on n_k is violated (m_k >= 2 fails)"
                )
            m_k = len(fam) if m_k is None else min(m_k, len(fam))
            twins = [
                Cube(b.p, b.q, c1 * _to_fraction_power(b.q, tau),
                     c2 * _to_fraction_power(b.q, tau))
                for b in fam
            ]
            twins.sort(key=lambda cube: tuple(cube.lo_corner(i) for i in range(d)))
            found_gap = _min_gap(twins)
            gap_k = found_gap if gap_k is None else min(gap_k, found_gap)
            if len(twins) > retain:
                idx = np.linspace(0, len(twins) - 1, retain).round().astype(int)
                twins = [twins[i] for i in sorted(set(int(v) for v in idx))]
            level_cubes.extend(twins)
        guaranteed = float(n_k) ** (-1.0 - 1.0 / d)
        e_k = min(gap_k, eps[-1] * (1 - 1e-12)) if eps else gap_k
        families.append(
            CubeFamily(
                level=k,
                cubes=level_cubes,
                meta={"n": n_k, "m": m_k, "eps_realized": gap_k,
                      "eps_guaranteed": guaranteed, "retained": len(level_cubes)},
            )
        )
        ns.append(n_k)
        ms.append(int(m_k))
        eps.append(e_k)
        parents = level_cubes
        n_prev = n_k
    plan = CantorPlan(d, float(tau), levels, tuple(ns), tuple(ms), tuple(eps))
    return families, plan


def _min_gap(cubes: Sequence[Cube]) -> float:
    """Smallest sup-norm distance between distinct cubes of the family."""
    if len(cubes) < 2:
        raise ValueError("need at least two cubes for a separation")
    d = cubes[0].d
    if d == 1:
        order = sorted(cubes, key=lambda c: c.lo_corner(0))
        best = None
        for a, b in zip(order, order[1:]):
            g = b.lo_corner(0) - a.hi_corner(0)
            best = g if best is None else min(best, g)
        return float(best)
    best = None
    for i in range(len(cubes)):
        for jdx in range(i + 1, len(cubes)):
            g = max(
                max(
                    cubes[jdx].lo_corner(t) - cubes[i].hi_corner(t),
                    cubes[i].lo_corner(t) - cubes[jdx].hi_corner(t),
                )
                for t in range(d)
            )
            best = g if best is None else min(best, g)
    return float(best)


def audit_nesting(parents: CubeFamily, children: CubeFamily) -> None:
    """Every child cube must sit inside exactly one parent cube."""
    for child in children:
        owners = 0
        for parent in parents:
            inside = all(
                parent.lo_corner(i) <= child.lo_corner(i)
                and child.hi_corner(i) <= parent.hi_corner(i)
                for i in range(child.d)
            )
            owners += inside
        if owners != 1:
            raise AssertionError(
                f"child {child.p}/{child.q} contained in {owners} parents"
            )


def cantor_lower_bound(plan: CantorPlan) -> float:
    """Finite-level mass-distribution dimension bound.

    min over k = 2..K of log(m_1 ... m_(k-1)) / (-log(eps_k m_k^(1/d))).
    """
    if plan.levels < 2:
        raise ValueError("need at least two construction levels")
    best = None
    log_prod = 0.0
    for k in range(2, plan.levels + 1):
        log_prod += math.log(plan.m[k - 2])
        inner = plan.eps[k - 1] * plan.m[k - 1] ** (1.0 / plan.d)
        if inner >= 1.0:
            raise ValueError(f"eps_{k} m_{k}^(1/d) = {inner:.3g} >= 1; log sign flips")
        val = log_prod / (-math.log(inner))
        best = val if best is None else min(best, val)
    return float(best)


def idealized_plan(d: int, lam: int, tau: float, levels: int) -> CantorPlan:
    """Self-similar reference plan: m_k = lam^(d+1), eps_k = lam^(-k tau)."""
    m = tuple(lam ** (d + 1) for _ in range(levels))
    eps = tuple(float(lam) ** (-k * tau) for k in range(1, levels + 1))
    n = tuple(lam**k for k in range(1, levels + 1))
    return CantorPlan(d, float(tau), levels, n, m, eps)


def level_volume_lower_bound(params: CounterexampleParams, j: int, cap: int = 1 << 20) -> float:
    """Lower bound for the Lebesgue measure of the level-j cube family at alpha = d.

    Counts pairwise-disjoint cubes by exact interval arithmetic and
    multiplies by the exact cube volume (cycle units).
    """
    if abs(params.alpha - params.d) > 1e-12:
        raise ValueError("volume lower bound applies to the case alpha = d only")
    fam = level_cube_family(params, j, cap=cap)
    if len(fam) == 0:
        raise ValueError(f"level-{j} family is empty")
    side = fam.cubes[0].side
    if params.d == 1:
        order = sorted(fam.cubes, key=lambda c: (c.hi_corner(0), c.lo_corner(0)))
        count = 0
        frontier = None
        for cube in order:
            if frontier is None or cube.lo_corner(0) > frontier:
                count += 1
                frontier = cube.hi_corner(0)
    else:
        chosen: list[Cube] = []
        for cube in fam.cubes:
            overlaps = any(
                all(
                    cube.lo_corner(i) <= other.hi_corner(i)
                    and other.lo_corner(i) <= cube.hi_corner(i)
                    for i in range(params.d)
                )
                for other in chosen
            )
            if not overlaps:
                chosen.append(cube)
        count = len(chosen)
    return count * float(side) ** params.d
