"""Seeded rational counterexample sampling.

Coordinates are drawn as n/d with |n| <= 100 and 1 <= d <= 10.  Half of the
samples take one exact correction step toward a hypothesis boundary: pick a
boundary atom, substitute the sampled values into all but one variable, and
replace that coordinate by an exact rational root of the resulting
univariate polynomial (the linear case is plain coordinate solving).  Points
that the projection cannot fix stay as drawn.  Every candidate is used only
through exact evaluation, so emitted witnesses are sound by construction.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import isqrt
from typing import Iterator, Optional, Sequence

from .polyarith import Polynomial

NUM_RANGE = 100
DEN_RANGE = 10
_DIVISOR_CAP = 10 ** 12
_MAX_DIVISORS = 128


def random_coordinate(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-NUM_RANGE, NUM_RANGE), rng.randint(1, DEN_RANGE))


def random_point(rng: random.Random, nvars: int) -> tuple[Fraction, ...]:
    return tuple(random_coordinate(rng) for _ in range(nvars))


def _divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0 or n > _DIVISOR_CAP:
        return []
    small, large = [], []
    d = 1
    while d * d <= n and len(small) < _MAX_DIVISORS:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def univariate_rational_roots(coeffs: dict[int, Fraction]) -> list[Fraction]:
    """All rational roots of sum coeffs[e] * x^e, exactly.

    Degenerate cases: the zero polynomial and constants return no roots
    (callers treat that as "no projection found").  Root candidates beyond the
    divisor cap are skipped, so the list may be incomplete for huge
    coefficients; every returned value is verified by exact evaluation.
    """
    coeffs = {e: c for e, c in coeffs.items() if c != 0}
    if not coeffs:
        return []
    roots: list[Fraction] = []
    min_exp = min(coeffs)
    if min_exp > 0:
        roots.append(Fraction(0))
        coeffs = {e - min_exp: c for e, c in coeffs.items()}
    deg = max(coeffs)
    if deg == 0:
        return roots
    if deg == 1:
        a1 = coeffs[1]
        a0 = coeffs.get(0, Fraction(0))
        root = -a0 / a1
        if root not in roots:
            roots.append(root)
        return sorted(roots)
    if deg == 2:
        a = coeffs[2]
        b = coeffs.get(1, Fraction(0))
        c = coeffs.get(0, Fraction(0))
        disc = b * b - 4 * a * c
        sq = _rational_sqrt(disc)
        if sq is not None:
            for root in ((-b + sq) / (2 * a), (-b - sq) / (2 * a)):
                if root not in roots:
                    roots.append(root)
        return sorted(roots)
    # integer form: common denominator, then content out
    den_lcm = 1
    for c in coeffs.values():
        den_lcm = den_lcm * c.denominator // _gcd(den_lcm, c.denominator)
    iofs = {e: int(c * den_lcm) for e, c in coeffs.items()}
    g = 0
    for v in iofs.values():
        g = _gcd(g, abs(v))
    iofs = {e: v // g for e, v in iofs.items()}
    lead = iofs[deg]
    const = iofs.get(0, 0)
    if const == 0:  # x factored out above, so const != 0 unless poly was x^k * c
        return sorted(roots)
    for num in _divisors(const):
        for den in _divisors(lead):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand in roots:
                    continue
                if _eval_univariate(iofs, cand) == 0:
                    roots.append(cand)
    return sorted(roots)


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None."""
    if x < 0:
        return None
    num_root = isqrt(x.numerator)
    den_root = isqrt(x.denominator)
    if num_root * num_root != x.numerator or den_root * den_root != x.denominator:
        return None
    return Fraction(num_root, den_root)


def _eval_univariate(coeffs: dict[int, Fraction], x: Fraction) -> Fraction:
    total = Fraction(0)
    for e, c in coeffs.items():
        total += c * x ** e
    return total


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a if a else 1


def restrict_to_variable(p: Polynomial, var: int,
                         point: Sequence[Fraction]) -> dict[int, Fraction]:
    """Coefficients of p as a univariate polynomial in ``var`` after
    substituting the point's values for all other variables."""
    out: dict[int, Fraction] = {}
    for m, c in p.terms.items():
        v = c
        for i, e in enumerate(m):
            if i != var and e:
                v *= point[i] ** e
        if v:
            out[m[var]] = out.get(m[var], Fraction(0)) + v
    return {e: c for e, c in out.items() if c != 0}


def project_to_boundary(point: tuple[Fraction, ...], atom: Polynomial,
                        rng: random.Random) -> Optional[tuple[Fraction, ...]]:
    """One exact correction step: replaces one coordinate of ``point`` so
    that ``atom`` vanishes, when a rational root exists."""
    candidates = sorted(atom.variables())
    if not candidates:
        return None
    rng.shuffle(candidates)
    for var in candidates:
        coeffs = restrict_to_variable(atom, var, point)
        roots = univariate_rational_roots(coeffs)
        if roots:
            root = roots[rng.randrange(len(roots))]
            return point[:var] + (root,) + point[var + 1:]
    return None


def sample_points(rng: random.Random, nvars: int, count: int,
                  boundary_atoms: Sequence[Polynomial]) -> Iterator[tuple[Fraction, ...]]:
    """Yield ``count`` candidate points, alternating uniform draws with
    boundary-projected draws when boundary atoms are available."""
    for k in range(count):
        point = random_point(rng, nvars)
        if boundary_atoms and k % 2 == 1:
            atom = boundary_atoms[rng.randrange(len(boundary_atoms))]
            projected = project_to_boundary(point, atom, rng)
            if projected is not None:
                point = projected
        yield point
