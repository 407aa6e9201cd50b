from fractions import Fraction

import pytest

from holoproj.characters import char_kronecker
from holoproj.kernel import projection_kernel
from holoproj.rings import cyc
from holoproj.smalldiv import (
    ABPair,
    CharacterParityError,
    CharacterPlacement,
    DivisorTuple,
    MultiIndex,
    ab_substitution,
    divisor_sum,
    divisor_tuples,
    sigma_sm,
    sigma_sm_classical,
    small_divisors,
)

CHI_M4 = char_kronecker(-4)
CHI_8 = char_kronecker(8)


def test_small_divisors_examples():
    assert small_divisors(1) == [1]
    assert small_divisors(4) == [2]     # d=1 fails parity against 4
    assert small_divisors(15) == [1, 3]
    assert small_divisors(2) == []


def test_parity_guarantee_up_to_1e4():
    for n in range(1, 10_001):
        for d in small_divisors(n):
            q = n // d
            assert (q + d) % 2 == 0
            assert (q - d) % 2 == 0


def test_divisor_tuples_products():
    ts = divisor_tuples(MultiIndex((15, 3)))
    assert [t.divisors for t in ts] == [(1, 1), (1, 1)] or len(ts) == 2
    assert {t.divisors for t in ts} == {(1, 1), (3, 1)}
    assert divisor_tuples(MultiIndex((2, 3))) == []
    ones = divisor_tuples(MultiIndex((1, 1, 1)))
    assert len(ones) == 1 and ones[0].divisors == (1, 1, 1)


def test_ab_substitution_values():
    t = DivisorTuple(MultiIndex((8,)), (2,))
    assert ab_substitution(t) == ABPair((3,), (1,))
    t9 = DivisorTuple(MultiIndex((9,)), (3,))
    assert ab_substitution(t9) == ABPair((3,), (0,))


def test_ab_substitution_round_trip():
    for n in range(1, 201):
        for t in divisor_tuples(MultiIndex((n,))):
            pair = ab_substitution(t)
            a, b = pair.a[0], pair.b[0]
            assert a * a - b * b == n
            assert a - b == t.divisors[0]
            assert a + b == n // t.divisors[0]


def test_multi_index_accessors():
    n = MultiIndex((3, 1, 4))
    assert n.product() == 12
    assert n.entry_sum() == 8
    assert n.norm_sq() == 26
    with pytest.raises(ValueError):
        MultiIndex((0, 1))


def test_divisor_tuple_validation():
    with pytest.raises(ValueError):
        DivisorTuple(MultiIndex((8,)), (3,))    # 3 does not divide 8
    with pytest.raises(ValueError):
        DivisorTuple(MultiIndex((4,)), (1,))    # parity fails
    with pytest.raises(ValueError):
        ABPair((1,), (1,))                      # needs a > b


def test_sigma_sm_all_ones_vanishes():
    k = projection_kernel(4)
    assert sigma_sm(MultiIndex((1, 1, 1, 1)), CHI_M4, CHI_8, k).is_zero()


def test_sigma_sm_8888_single_tuple():
    # only surviving tuple d = (2,2,2,2): a = (3,3,3,3), b = (1,1,1,1)
    k = projection_kernel(4)
    val = sigma_sm(MultiIndex((8, 8, 8, 8)), CHI_M4, CHI_8, k)
    assert val == cyc(81 * k.eval(36, 4))
    assert val == cyc(Fraction(-8192, 729))
    k_sm = projection_kernel(4, "prefactor_on_smaller")
    val_sm = sigma_sm(MultiIndex((8, 8, 8, 8)), CHI_M4, CHI_8, k_sm)
    assert val_sm == cyc(81 * Fraction(8192, 9))


def test_sigma_sm_one_dim_9_vanishes():
    # d=1 gives b=4 with chi_8(4)=0; d=3 gives b=0
    k = projection_kernel(1)
    assert sigma_sm(MultiIndex((9,)), CHI_M4, CHI_8, k).is_zero()


def test_sigma_sm_structural_vanishing_entries_1_and_2():
    k = projection_kernel(4)
    for nvec in [(1, 3, 3, 3), (2, 8, 8, 8), (8, 8, 2, 8), (8, 1, 8, 8)]:
        assert sigma_sm(MultiIndex(nvec), CHI_M4, CHI_8, k).is_zero()


def test_sigma_sm_placement_flag_changes_values():
    k = projection_kernel(4)
    default = sigma_sm(MultiIndex((8, 8, 8, 8)), CHI_M4, CHI_8, k,
                       CharacterPlacement.PSI_ON_LARGER)
    swapped = sigma_sm(MultiIndex((8, 8, 8, 8)), CHI_M4, CHI_8, k,
                       CharacterPlacement.CHI_ON_LARGER)
    # swapped printing puts chi_8 on a! = 81 (value 1, no power factor)
    # and chi_m4 on b! = 1 (power factor 1)
    assert swapped == cyc(k.eval(36, 4))
    assert default != swapped


def test_sigma_sm_parity_validation():
    k = projection_kernel(4)
    with pytest.raises(CharacterParityError):
        sigma_sm(MultiIndex((8, 8, 8, 8)), CHI_8, CHI_8, k)   # psi must be odd
    with pytest.raises(CharacterParityError):
        sigma_sm(MultiIndex((8, 8, 8, 8)), CHI_M4, CHI_M4, k)  # chi must be even
    with pytest.raises(ValueError):
        sigma_sm(MultiIndex((8, 8)), CHI_M4, CHI_8, k)        # dimension mismatch


def test_sigma_sm_classical_values():
    assert sigma_sm_classical(8, CHI_M4, CHI_8, power=2) == cyc(-4)
    assert sigma_sm_classical(2, CHI_M4, CHI_8, power=1).is_zero()
    assert sigma_sm_classical(2, CHI_M4, CHI_8, power=2).is_zero()


@pytest.mark.parametrize("psi", [CHI_M4, CHI_8], ids=["m4", "8"])
def test_sigma_sm_classical_brute_force_oracle(psi):
    # independent oracle: scan every divisor d of n with the three conditions
    for n in range(1, 501):
        expected = cyc(0)
        for d in range(1, n + 1):
            if n % d != 0 or d > n // d or (d - n // d) % 2 != 0:
                continue
            q = n // d
            expected = expected + psi((q - d) // 2) * psi((q + d) // 2) * d
        assert sigma_sm_classical(n, psi, psi, power=1) == expected


def test_divisor_sum():
    assert divisor_sum(1, 1) == 1
    assert divisor_sum(4, 1) == 7
    assert divisor_sum(6, 1) == 12
    assert divisor_sum(6, 0) == 4
    assert divisor_sum(4, 2) == 21
