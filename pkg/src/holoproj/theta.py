"""Twisted theta series and their powers, computed two independent ways.

theta_series sums the defining series directly: coefficient psi(n) n^lambda
at each square exponent n^2.  theta_power_direct enumerates the rank-l
lattice N^l with radius pruning and never touches series multiplication, so
the two paths cross-check each other (power via repeated squaring vs direct
representation-number enumeration).
"""

from __future__ import annotations

from .characters import DirichletCharacter
from .qseries import QSeries
from .rings import cyc


def theta_series(psi: DirichletCharacter, N: int) -> QSeries:
    """Sum over n >= 1 of psi(n) n^lambda q^(n^2), certified to exponent N.

    The trivial character of modulus 1 is rejected: its n = 0 term would
    contribute a constant 1/2 and no identity here needs it.
    """
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    if psi.modulus == 1:
        raise ValueError("trivial character mod 1 is not admitted (n=0 term)")
    lam = psi.parity
    coeffs = {}
    n = 1
    while n * n <= N:
        v = psi(n)
        if not v.is_zero():
            coeffs[n * n] = v * (n ** lam)
        n += 1
    return QSeries(1, N, coeffs)


def theta_power_direct(psi: DirichletCharacter, l: int, N: int) -> QSeries:
    """Coefficient of q^M as the direct lattice sum over n in {1,2,...}^l with
    |n|^2 = M of psi(n_1...n_l) (n_1...n_l)^lambda.

    Enumeration is by nested descent with radius pruning; subtrees whose next
    coordinate kills the character are skipped (exact, by complete
    multiplicativity).  Sums are accumulated as integers bucketed by the
    residue class of the coordinate product, and character values are applied
    once per (exponent, residue) in sorted order, so results are bit-identical
    run to run.
    """
    if l < 1:
        raise ValueError(f"need l >= 1, got {l}")
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    if psi.modulus == 1:
        raise ValueError("trivial character mod 1 is not admitted")
    mod = psi.modulus
    lam = psi.parity
    unit_residues = [a for a in range(mod) if not psi.values[a].is_zero()]
    unit_set = set(unit_residues)

    # buckets[exponent][residue of product mod M] -> integer sum of products^lam
    buckets: dict[int, dict[int, int]] = {}

    def descend(position: int, budget: int, norm: int, prod: int, res: int):
        if position == l:
            slot = buckets.setdefault(norm, {})
            slot[res] = slot.get(res, 0) + prod ** lam
            return
        remaining_min = l - 1 - position
        n = 1
        while n * n + remaining_min <= budget:
            r = (res * n) % mod
            if r in unit_set:
                descend(position + 1, budget - n * n, norm + n * n, prod * n, r)
            n += 1

    descend(0, N, 0, 1, 1 % mod)

    coeffs = {}
    for exponent in sorted(buckets):
        acc = cyc(0)
        for residue in sorted(buckets[exponent]):
            acc = acc + psi.values[residue] * buckets[exponent][residue]
        if not acc.is_zero():
            coeffs[exponent] = acc
    return QSeries(min(l, N), N, coeffs) if N >= l else QSeries(1, N, {})


def theta_power_series(psi: DirichletCharacter, l: int, N: int) -> QSeries:
    """The same power through repeated squaring of theta_series: the second,
    independent path used by the dual-path cross-check."""
    return theta_series(psi, N).pow(l)
