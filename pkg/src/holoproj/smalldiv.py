"""Small divisor sets, multi-index divisor tuples, and the small divisor
functions (one-dimensional and multi-index).

D_n is the set of divisors d | n with d <= n/d and d = n/d (mod 2); the
parity condition makes (n/d + d)/2 and (n/d - d)/2 integers, which is the
substitution a = (n/d + d)/2, b = (n/d - d)/2 used everywhere below.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product

from .characters import DirichletCharacter
from .kernel import ProjectionKernel
from .rings import CyclotomicNumber, cyc


class CharacterParityError(ValueError):
    """The twist pair violates the required parities (psi odd, chi even
    non-trivial)."""


def small_divisors(n: int) -> list[int]:
    """D_n as a sorted list: d | n with d <= n/d and d = n/d mod 2."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0 and (d - n // d) % 2 == 0:
            out.append(d)
        d += 1
    return out


def divisor_sum(n: int, k: int = 1) -> int:
    """sigma_k(n) = sum of d^k over all divisors d of n."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** k
            if d != n // d:
                total += (n // d) ** k
        d += 1
    return total


@dataclass(frozen=True)
class MultiIndex:
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if not self.entries or any(e < 1 for e in self.entries):
            raise ValueError(f"entries must all be >= 1, got {self.entries}")

    def __len__(self):
        return len(self.entries)

    def product(self) -> int:
        out = 1
        for e in self.entries:
            out *= e
        return out

    def entry_sum(self) -> int:
        return sum(self.entries)

    def norm_sq(self) -> int:
        return sum(e * e for e in self.entries)


@dataclass(frozen=True)
class DivisorTuple:
    base: MultiIndex
    divisors: tuple

    def __post_init__(self):
        object.__setattr__(self, "divisors", tuple(int(d) for d in self.divisors))
        if len(self.divisors) != len(self.base):
            raise ValueError("divisor tuple length mismatch")
        for n, d in zip(self.base.entries, self.divisors):
            if n % d != 0 or d * d > n or (d - n // d) % 2 != 0:
                raise ValueError(f"{d} is not a small divisor of {n}")


@dataclass(frozen=True)
class ABPair:
    a: tuple
    b: tuple

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ValueError("component count mismatch")
        for aj, bj in zip(self.a, self.b):
            if not (aj > bj >= 0):
                raise ValueError(f"need a_j > b_j >= 0, got ({aj}, {bj})")

    def a_norm_sq(self) -> int:
        return sum(x * x for x in self.a)

    def b_norm_sq(self) -> int:
        return sum(x * x for x in self.b)

    def a_product(self) -> int:
        out = 1
        for x in self.a:
            out *= x
        return out

    def b_product(self) -> int:
        out = 1
        for x in self.b:
            out *= x
        return out


def divisor_tuples(n: MultiIndex) -> list[DivisorTuple]:
    """Cartesian product of the small-divisor sets; empty when any factor
    set is empty (e.g. any entry equal to 2)."""
    per_entry = [small_divisors(e) for e in n.entries]
    if any(not s for s in per_entry):
        return []
    return [DivisorTuple(n, ds) for ds in product(*per_entry)]


def ab_substitution(t: DivisorTuple) -> ABPair:
    """a_j = (n_j/d_j + d_j)/2, b_j = (n_j/d_j - d_j)/2; the parity condition
    in D_n makes both integral, and a_j^2 - b_j^2 = n_j."""
    a = []
    b = []
    for n, d in zip(t.base.entries, t.divisors):
        q = n // d
        a.append((q + d) // 2)
        b.append((q - d) // 2)
    return ABPair(tuple(a), tuple(b))


class CharacterPlacement(enum.Enum):
    """Which character evaluates on the larger substitution argument a.

    PSI_ON_LARGER is the placement that cancels termwise against the
    projection sum (and matches the one-dimensional definition); CHI_ON_LARGER
    is the swapped printing, kept runnable so the discrepancy between the two
    is demonstrable."""

    PSI_ON_LARGER = "psi_on_larger"
    CHI_ON_LARGER = "chi_on_larger"


def require_twist_pair(psi: DirichletCharacter, chi: DirichletCharacter) -> None:
    if not psi.is_odd():
        raise CharacterParityError("psi must be odd")
    if not chi.is_even():
        raise CharacterParityError("chi must be even")
    if chi.is_trivial():
        raise CharacterParityError("chi must be non-trivial")


def sigma_sm(
    n: MultiIndex,
    psi: DirichletCharacter,
    chi: DirichletCharacter,
    kernel: ProjectionKernel,
    placement: CharacterPlacement = CharacterPlacement.PSI_ON_LARGER,
) -> CyclotomicNumber:
    """Multi-index small divisor function with the projection kernel weight.

    Sums over the divisor tuples of n; each tuple contributes
    [char-on-larger](a!) (a!)^lambda * [char-on-smaller](b!) (b!)^lambda *
    K(|a|^2, |b|^2).  Terms with any b_j = 0 vanish through the character
    (chi(0) = 0 for non-trivial chi, and 0^0 = 1), never via a special case.
    """
    require_twist_pair(psi, chi)
    if len(n) != kernel.l:
        raise ValueError(f"kernel is for dimension {kernel.l}, index has {len(n)}")
    if placement == CharacterPlacement.PSI_ON_LARGER:
        on_larger, lam_larger = psi, psi.parity
        on_smaller, lam_smaller = chi, chi.parity
    else:
        on_larger, lam_larger = chi, chi.parity
        on_smaller, lam_smaller = psi, psi.parity

    total = cyc(0)
    for t in divisor_tuples(n):
        pair = ab_substitution(t)
        pa, pb = pair.a_product(), pair.b_product()
        ca = on_larger(pa)
        if ca.is_zero():
            continue
        cb = on_smaller(pb)
        if cb.is_zero():
            continue
        weight = kernel.eval(pair.a_norm_sq(), pair.b_norm_sq())
        total = total + ca * cb * cyc(weight * pa ** lam_larger * pb ** lam_smaller)
    return total


def sigma_sm_classical(
    n: int,
    psi: DirichletCharacter,
    chi: DirichletCharacter,
    power: int,
) -> CyclotomicNumber:
    """One-dimensional small divisor function with polynomial weight d^power
    (power 1 and 2 are the classically studied cases):

        sum over d in D_n of chi((n/d - d)/2) psi((n/d + d)/2) d^power
    """
    if power not in (1, 2):
        raise ValueError(f"supported weights are d and d^2, got power {power}")
    total = cyc(0)
    for d in small_divisors(n):
        q = n // d
        a, b = (q + d) // 2, (q - d) // 2
        cb = chi(b)
        if cb.is_zero():
            continue
        ca = psi(a)
        if ca.is_zero():
            continue
        total = total + ca * cb * (d ** power)
    return total
