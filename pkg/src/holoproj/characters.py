"""Dirichlet characters with exact cyclotomic values.

Characters are stored as explicit value tables over the residues 0..M-1 (the
moduli in play are tiny), validated for multiplicativity on every residue
pair.  Zero entries are genuine cyclotomic zeros so coefficient arithmetic
downstream needs no special cases.
"""

from __future__ import annotations

from math import gcd

from .rings import CyclotomicNumber, cyc, value_from_json


class CharacterTableError(ValueError):
    """Raised when a value table fails Dirichlet-character validation."""


class DirichletCharacter:
    """Immutable character mod M given by its full value table.

    parity is 0 for even characters (value(-1) = 1) and 1 for odd ones.
    order is the multiplicative order of the character in the dual group.
    """

    __slots__ = ("modulus", "values", "order", "parity")

    def __init__(self, modulus: int, values, order: int, parity: int):
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "values", tuple(values))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "parity", parity)

    def __setattr__(self, *a):
        raise AttributeError("DirichletCharacter is immutable")

    def __reduce__(self):
        return (DirichletCharacter, (self.modulus, self.values, self.order, self.parity))

    def __call__(self, n: int) -> CyclotomicNumber:
        return self.values[n % self.modulus]

    def is_odd(self) -> bool:
        return self.parity == 1

    def is_even(self) -> bool:
        return self.parity == 0

    def is_trivial(self) -> bool:
        return all(
            self.values[a] == 1
            for a in range(self.modulus)
            if gcd(a, self.modulus) == 1
        )

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.modulus == other.modulus and self.values == other.values

    def __hash__(self):
        return hash((self.modulus, self.values))

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, order {self.order}, parity {self.parity})"


def char_from_table(modulus: int, values) -> DirichletCharacter:
    """Build and validate a character from residue -> value.

    ``values`` may be a sequence indexed by residue or a dict {residue: value};
    entries coerce from int / Fraction / CyclotomicNumber.
    """
    if modulus < 1:
        raise CharacterTableError(f"modulus must be positive, got {modulus}")
    if isinstance(values, dict):
        missing = [a for a in range(modulus) if a not in values]
        if missing:
            raise CharacterTableError(f"table misses residues {missing}")
        table = [cyc(values[a]) for a in range(modulus)]
    else:
        table = [cyc(v) for v in values]
        if len(table) != modulus:
            raise CharacterTableError(
                f"table covers {len(table)} residues, modulus is {modulus}"
            )

    one = cyc(1)
    if table[1 % modulus] != one:
        raise CharacterTableError("value(1) must be 1")
    for a in range(modulus):
        if gcd(a, modulus) > 1:
            if not table[a].is_zero():
                raise CharacterTableError(f"value({a}) must be 0 (gcd({a},{modulus})>1)")
        elif table[a].is_zero():
            raise CharacterTableError(f"value({a}) must be nonzero (unit residue)")
    for a in range(modulus):
        for b in range(modulus):
            if table[(a * b) % modulus] != table[a] * table[b]:
                raise CharacterTableError(
                    f"multiplicativity fails at ({a},{b}) mod {modulus}"
                )

    vm1 = table[(modulus - 1) % modulus]
    if vm1 == one:
        parity = 0
    elif vm1 == cyc(-1):
        parity = 1
    else:
        raise CharacterTableError("value(-1) must be +1 or -1")

    order = 1
    for a in range(modulus):
        if gcd(a, modulus) == 1:
            k = table[a].multiplicative_order(bound=4 * modulus * modulus)
            order = order * k // gcd(order, k)
    return DirichletCharacter(modulus, table, order, parity)


def kronecker_symbol(D: int, n: int) -> int:
    """Kronecker symbol (D|n) for n >= 0."""
    if n == 0:
        return 1 if D in (1, -1) else 0
    out = 1
    if n < 0:
        raise ValueError("kronecker_symbol expects n >= 0 here")
    # factor out 2s
    while n % 2 == 0:
        if D % 2 == 0:
            return 0
        d8 = D % 8
        out *= 1 if d8 in (1, 7) else -1
        n //= 2
    # odd part via Legendre symbols (Euler's criterion), prime by prime
    m = n
    p = 3
    while m > 1:
        while p * p <= m and m % p != 0:
            p += 2
        q = p if p * p <= m else m
        while m % q == 0:
            ls = pow(D % q, (q - 1) // 2, q)
            if ls == q - 1:
                out = -out
            elif ls == 0:
                return 0
            m //= q
    return out


def is_fundamental_discriminant(D: int) -> bool:
    if D == 0:
        return False
    if D == 1:
        return True

    def squarefree(m):
        m = abs(m)
        k = 2
        while k * k <= m:
            if m % (k * k) == 0:
                return False
            k += 1
        return True

    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def char_kronecker(D: int) -> DirichletCharacter:
    """Real character of modulus |D| given by the Kronecker symbol (D|.).

    D must be a fundamental discriminant; D = 1 yields the trivial character
    of modulus 1.
    """
    if not is_fundamental_discriminant(D):
        raise CharacterTableError(f"{D} is not a fundamental discriminant")
    M = abs(D)
    return char_from_table(M, [kronecker_symbol(D, a) for a in range(M)])


def char_product(psi: DirichletCharacter, chi: DirichletCharacter) -> DirichletCharacter:
    """Pointwise product at the lcm modulus."""
    M = psi.modulus * chi.modulus // gcd(psi.modulus, chi.modulus)
    table = []
    for a in range(M):
        if gcd(a, M) > 1:
            table.append(cyc(0))
        else:
            table.append(psi(a) * chi(a))
    return char_from_table(M, table)


def char_conjugate(chi: DirichletCharacter) -> DirichletCharacter:
    """Complex conjugate character (coordinate-wise zeta -> zeta^(-1))."""
    return char_from_table(chi.modulus, [v.conjugate() for v in chi.values])


def char_inverse(chi: DirichletCharacter) -> DirichletCharacter:
    # values are roots of unity or 0, so the inverse is the conjugate
    return char_conjugate(chi)


def char_from_spec(spec) -> DirichletCharacter:
    """Config-file character spec: {"kronecker": D} or
    {"modulus": M, "values": [...]} (values as ints, "p/q" strings, or
    {order, coords} objects)."""
    if not isinstance(spec, dict):
        raise CharacterTableError(f"character spec must be an object, got {spec!r}")
    if "kronecker" in spec:
        return char_kronecker(int(spec["kronecker"]))
    if "modulus" in spec and "values" in spec:
        values = [value_from_json(v) for v in spec["values"]]
        return char_from_table(int(spec["modulus"]), values)
    raise CharacterTableError(
        "character spec needs either 'kronecker' or 'modulus'+'values'"
    )
