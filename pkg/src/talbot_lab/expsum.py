"""Quadratic exponential sums.

Exact evaluation of complete and incomplete quadratic sums, a perturbed
complete-sum check, and the classical square-root-cancellation bound
calculators (second/first derivative tests, summation by parts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

TAU = 2.0 * math.pi

# r*(k^2 % q) + p*(k % q) must fit in int64 before the final reduction.
MODULUS_LIMIT = 2**31

_CHUNK = 1 << 20


@dataclass(frozen=True)
class GaussSumSpec:
    """Complete sum over k = 0..q-1 of e^{2 pi i (r k^2 + p k)/q}."""

    q: int
    r: int
    p: int = 0

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError(f"modulus must be positive, got q={self.q}")
        if self.q > MODULUS_LIMIT:
            raise ValueError(
                f"q={self.q} exceeds the exact integer-reduction limit {MODULUS_LIMIT}"
            )


@dataclass(frozen=True)
class IntegerInterval:
    """Closed integer interval [left, right]; its length is right - left."""

    left: int
    right: int

    def __post_init__(self) -> None:
        if self.left < 0:
            raise ValueError(f"left endpoint must be nonnegative, got {self.left}")
        if self.left > self.right:
            raise ValueError(f"empty interval [{self.left}, {self.right}]")
        if self.right > MODULUS_LIMIT:
            raise ValueError(f"right endpoint {self.right} exceeds limit {MODULUS_LIMIT}")

    @property
    def length(self) -> int:
        return self.right - self.left

    @property
    def npoints(self) -> int:
        return self.right - self.left + 1

    def points(self) -> np.ndarray:
        return np.arange(self.left, self.right + 1, dtype=np.int64)


@dataclass(frozen=True)
class QuadraticPhase:
    """Phase f(k) = (a2 k^2 + a1 k)/q + eps*k, in cycles.

    The rational part is reduced modulo 1 exactly in integer arithmetic;
    only the eps*k part is handled in floating point.
    """

    a2: int
    a1: int
    q: int
    eps: float = 0.0

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError(f"modulus must be positive, got q={self.q}")
        if self.q > MODULUS_LIMIT:
            raise ValueError(f"q={self.q} exceeds limit {MODULUS_LIMIT}")


def gauss_sum_bruteforce(spec: GaussSumSpec) -> complex:
    """Evaluate the complete quadratic sum by direct summation.

    Each phase (r k^2 + p k) mod q is reduced exactly in integers before
    the single conversion to floating point, so the result stays accurate
    for any q up to MODULUS_LIMIT.
    """
    q = spec.q
    r = spec.r % q
    p = spec.p % q
    total = 0.0 + 0.0j
    for start in range(0, q, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, q), dtype=np.int64)
        idx = (r * (k * k % q) % q + p * k % q) % q
        total += np.exp(2j * math.pi * (idx / q)).sum()
    return complex(total)


def gauss_sum_table(q: int, r: int) -> np.ndarray:
    """Complete quadratic sums for every linear coefficient p = 0..q-1 at once.

    The quadratic part is reduced exactly; the linear part is applied as a
    discrete Fourier transform, which computes the same sums in O(q log q).
    """
    if q < 1 or q > MODULUS_LIMIT:
        raise ValueError(f"modulus {q} out of range")
    r = r % q
    k = np.arange(q, dtype=np.int64)
    v = np.exp(2j * math.pi * ((r * (k * k % q)) % q / q))
    # sum_k v_k e^{2 pi i p k / q} = q * ifft(v)[p]
    return q * np.fft.ifft(v)


def gauss_sum_magnitude(spec: GaussSumSpec) -> float:
    """Closed-form magnitude of the complete sum, classified by q mod 4.

    Requires gcd(r, q) = 1; the four cases are sqrt(q) for odd q,
    sqrt(2q) when q = 0 (mod 4) with even p or q = 2 (mod 4) with odd p,
    and 0 otherwise.
    """
    q, r, p = spec.q, spec.r, spec.p
    if math.gcd(r, q) != 1:
        raise ValueError(f"closed form needs gcd(r, q) = 1, got r={r}, q={q}")
    if q % 2 == 1:
        return math.sqrt(q)
    if q % 4 == 0 and p % 2 == 0:
        return math.sqrt(2 * q)
    if q % 4 == 2 and p % 2 == 1:
        return math.sqrt(2 * q)
    return 0.0


def weyl_sum(phase: QuadraticPhase, interval: IntegerInterval) -> complex:
    """Sum of e^{2 pi i f(k)} over the integer interval."""
    q = phase.q
    a2 = phase.a2 % q
    a1 = phase.a1 % q
    total = 0.0 + 0.0j
    for start in range(interval.left, interval.right + 1, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, interval.right + 1), dtype=np.int64)
        km = k % q
        idx = (a2 * (km * km % q) % q + a1 * km % q) % q
        frac = idx / q + (phase.eps * k) % 1.0
        total += np.exp(2j * math.pi * frac).sum()
    return complex(total)


def perturbed_gauss_sum_value(q: int, p: int, eps: float) -> complex:
    """Sum over r = 0..q-1 of e^{2 pi i (r(p/q + eps) - r^2/q)}."""
    if q < 1 or q > MODULUS_LIMIT:
        raise ValueError(f"modulus {q} out of range")
    pm = p % q
    total = 0.0 + 0.0j
    for start in range(0, q, _CHUNK):
        r = np.arange(start, min(start + _CHUNK, q), dtype=np.int64)
        idx = (r * pm % q - r * r % q) % q
        frac = idx / q + (eps * r) % 1.0
        total += np.exp(2j * math.pi * frac).sum()
    return complex(total)


class PerturbedGaussCheck(NamedTuple):
    magnitude: float
    deviation: float


def perturbed_gauss_sum_check(q: int, p: int, eps: float) -> PerturbedGaussCheck:
    """Magnitude of the perturbed complete sum and its drift from sqrt(2q).

    Preconditions: q = 0 (mod 4), p = 0 (mod 2) and |eps| q < 1/10, the
    regime where the unperturbed magnitude is exactly sqrt(2q).
    """
    if q % 4 != 0:
        raise ValueError(f"q must be divisible by 4, got {q}")
    if p % 2 != 0:
        raise ValueError(f"p must be even, got {p}")
    if abs(eps) * q >= 0.1:
        raise ValueError(f"|eps| q = {abs(eps) * q:.3g} violates the smallness bound 1/10")
    mag = abs(perturbed_gauss_sum_value(q, p, eps))
    return PerturbedGaussCheck(mag, abs(mag - math.sqrt(2 * q)))


def vdc_second_derivative_bound(interval: IntegerInterval, m: float, ratio: float) -> float:
    """Second-derivative-test bound ratio*|I|*sqrt(M) + 1/sqrt(M).

    The implicit constant of the underlying estimate is carried by the
    caller; m is the lower bound of |f''| and ratio the upper/lower ratio.
    """
    if m <= 0:
        raise ValueError(f"M must be positive, got {m}")
    if ratio < 1:
        raise ValueError(f"ratio must be >= 1, got {ratio}")
    return ratio * interval.length * math.sqrt(m) + 1.0 / math.sqrt(m)


def vdc_first_derivative_bound(kappa: float) -> float:
    """First-derivative-test bound 1/kappa for phases with derivative at
    distance >= kappa from the integers (constant carried by caller)."""
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if kappa > 0.5:
        raise ValueError(f"kappa={kappa} exceeds 1/2, the largest possible distance")
    return 1.0 / kappa


class AbelBoundCheck(NamedTuple):
    bound: float
    lhs: float
    holds: bool


ABEL_SLACK = 1e-10


def abel_bound_check(
    a: Sequence[float],
    b: Sequence[complex],
    interval: IntegerInterval | None = None,
) -> AbelBoundCheck:
    """Check the summation-by-parts inequality |sum a_k b_k| <= C * a_end.

    C is the exact maximum of |sum of b over I'| over all integer
    subintervals I', computed from prefix sums in O(n^2).  The monotone
    endpoint is a[left] for nonincreasing weights and a[right] for
    nondecreasing ones.
    """
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=complex)
    if av.shape != bv.shape or av.ndim != 1 or av.size == 0:
        raise ValueError("weight and term sequences must be equal-length 1-d arrays")
    if interval is not None and interval.npoints != av.size:
        raise ValueError(
            f"interval has {interval.npoints} points but sequences have {av.size}"
        )
    if np.any(av < 0):
        raise ValueError("weights must be nonnegative")
    nonincreasing = bool(np.all(np.diff(av) <= 0))
    nondecreasing = bool(np.all(np.diff(av) >= 0))
    if not (nonincreasing or nondecreasing):
        raise ValueError("weights must be monotone")
    if av.size > 4096:
        raise ValueError("subinterval maximum is O(n^2); desk-scale limit is 4096 terms")

    prefix = np.concatenate(([0.0 + 0.0j], np.cumsum(bv)))
    c_max = float(np.max(np.abs(prefix[None, :] - prefix[:, None])))
    endpoint = av[0] if nonincreasing else av[-1]
    bound = c_max * float(endpoint)
    lhs = float(abs(np.sum(av * bv)))
    return AbelBoundCheck(bound, lhs, lhs <= bound + ABEL_SLACK)
