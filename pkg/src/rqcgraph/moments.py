"""Exact single-edge Haar moments via symmetric-group cycle sums.

Traces of permutation operators on d-dimensional tensor factors are d raised
to the number of disjoint cycles, so every moment here reduces to an exact
integer sum over a symmetric group followed by one rational division.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import CapacityError, ValidationError

MAX_ALPHA = 8  # factorial enumeration of S_alpha; 8! = 40320 terms


def identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """(p o q)(i) = p(q(i)): apply q first, then p."""
    return tuple(p[q[i]] for i in range(len(p)))


def inverse_perm(p: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def cycle_count(p: tuple[int, ...]) -> int:
    """Number of disjoint cycles, fixed points included."""
    n = len(p)
    if sorted(p) != list(range(n)):
        raise ValidationError(f"{p} is not a permutation of 0..{n - 1}")
    seen = [False] * n
    cycles = 0
    for i in range(n):
        if seen[i]:
            continue
        cycles += 1
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
    return cycles


def shift_perm(alpha: int) -> tuple[int, ...]:
    """The alpha-cycle implementing the copy shift |i1..ia> -> |ia,i1..>."""
    return tuple((i + 1) % alpha for i in range(alpha))


def nd_constant(d: int) -> float:
    """N_d = d / (d^2 + 1), the alpha=2 single-edge twirl constant."""
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got d={d}")
    return d / (d * d + 1)


@dataclass(frozen=True)
class MomentResult:
    alpha: int
    d: int
    value: float


@lru_cache(maxsize=None)
def _alpha_moment_fraction(alpha: int, d: int) -> Fraction:
    shift = shift_perm(alpha)
    total = 0
    for sigma in itertools.permutations(range(alpha)):
        total += d ** cycle_count(compose(sigma, shift)) * d ** cycle_count(sigma)
    d_plus = math.comb(alpha + d * d - 1, d * d - 1)
    return Fraction(total, math.factorial(alpha)) / d_plus


def single_edge_alpha_moment(alpha: int, d: int) -> MomentResult:
    """Mean of Tr(rho_A^alpha) after one Haar gate on a single straddling edge.

    C(alpha, d) = [1 / binom(alpha+d^2-1, d^2-1)] (1/alpha!)
                  sum_{sigma in S_alpha} d^{c(sigma o shift)} d^{c(sigma)}.
    For alpha=2 this collapses to 2 N_d.
    """
    if alpha < 1:
        raise ValidationError(f"Renyi order must be >= 1, got {alpha}")
    if alpha > MAX_ALPHA:
        raise CapacityError(
            f"alpha={alpha} exceeds the S_alpha enumeration cap {MAX_ALPHA}"
        )
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got d={d}")
    return MomentResult(alpha, d, float(_alpha_moment_fraction(alpha, d)))


def second_moment_numerator(d: int) -> int:
    """Integer numerator sum (1/24) sum_{S_4} d^{c((01)(23) o s)} d^{c(s)}.

    Equals d^2 (2 d^4 + 9 d^2 + 1) / 12.
    """
    rho = (1, 0, 3, 2)  # (01)(23) in S_4
    total = 0
    for sigma in itertools.permutations(range(4)):
        total += d ** cycle_count(compose(rho, sigma)) * d ** cycle_count(sigma)
    frac = Fraction(total, 24)
    assert frac.denominator == 1
    return frac.numerator


@lru_cache(maxsize=None)
def _second_moment_fraction(d: int) -> Fraction:
    d_plus = math.comb(d * d + 3, 4)
    return Fraction(second_moment_numerator(d), d_plus)


def second_moment_I(d: int) -> float:
    """Second moment I = mean of (Tr rho_A^2)^2 for the single straddling edge."""
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got d={d}")
    return float(_second_moment_fraction(d))


def single_edge_purity_variance(d: int) -> float:
    """Var[Tr rho_A^2] = 2 (d^2-1)^2 / [(d^2+3)(d^2+2)(d^2+1)^2]."""
    if d < 2:
        raise ValidationError(f"local dimension must be >= 2, got d={d}")
    d2 = d * d
    return float(
        Fraction(2 * (d2 - 1) ** 2, (d2 + 3) * (d2 + 2) * (d2 + 1) ** 2)
    )
