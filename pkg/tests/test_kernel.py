import random
from fractions import Fraction

import pytest

from holoproj.characters import char_kronecker, char_product
from holoproj.jacobi import jacobi_poly
from holoproj.kernel import (
    BivariateLaurent,
    NonSquareArgumentError,
    WeightError,
    kernel_bivariate,
    kernel_eval,
    modular_meta,
    parallelogram_check,
    projection_kernel,
    theta_space_label,
    verify_closed_forms,
    weights_for_dim,
)

F = Fraction
CHI_M4 = char_kronecker(-4)
CHI_8 = char_kronecker(8)


def test_weight_bookkeeping():
    w4 = weights_for_dim(4)
    assert (w4.k_f, w4.kappa) == (F(0), 6)
    assert w4.k_g == F(6)
    assert w4.shadow_weight == -4
    assert w4.parity_class == "even-l-integral"
    w3 = weights_for_dim(3)
    assert (w3.k_f, w3.kappa) == (F(1, 2), 5)
    assert w3.parity_class == "odd-l-half-integral"
    w5 = weights_for_dim(5)
    assert (w5.k_f, w5.kappa) == (F(-1, 2), 7)
    w1 = weights_for_dim(1)
    assert (w1.k_f, w1.kappa) == (F(3, 2), 3)


def test_dimension_two_rejected():
    with pytest.raises(WeightError):
        weights_for_dim(2)


def test_kernel_l1_closed_form():
    # (x - y)^2 / (2x) = x/2 - y + y^2/(2x)
    k = kernel_bivariate(weights_for_dim(1))
    assert k == BivariateLaurent({(1, 0): F(1, 2), (0, 1): -1, (-1, 2): F(1, 2)})


def test_kernel_l4_both_orientations():
    xxyy5 = BivariateLaurent({(2, 0): 1, (0, 2): -1}).pow(5)
    larger = kernel_bivariate(weights_for_dim(4), "prefactor_on_larger")
    smaller = kernel_bivariate(weights_for_dim(4), "prefactor_on_smaller")
    assert larger == (-1) * xxyy5.shift(-10, -2)
    assert smaller == xxyy5.shift(-2, -10)


@pytest.mark.parametrize("l", [1, 3, 4, 5, 6, 8, 10])
def test_orientation_swap_is_variable_swap(l):
    w = weights_for_dim(l)
    larger = kernel_bivariate(w, "prefactor_on_larger")
    smaller = kernel_bivariate(w, "prefactor_on_smaller")
    assert larger.swap_vars() == smaller


@pytest.mark.parametrize("l", [4, 6, 8, 10])
def test_even_dimensions_have_even_exponents(l):
    assert kernel_bivariate(weights_for_dim(l)).exponents_all_even()


@pytest.mark.parametrize("l", [1, 3, 5])
def test_odd_dimensions_have_odd_exponents(l):
    k = kernel_bivariate(weights_for_dim(l))
    assert any(i % 2 or j % 2 for i, j in k.terms)


def test_kernel_eval_landmarks():
    k4 = projection_kernel(4)
    assert k4.eval(36, 4) == F(-8192, 59049)
    k4s = projection_kernel(4, "prefactor_on_smaller")
    assert k4s.eval(36, 4) == F((36 - 4) ** 5, 36 * 4 ** 5)
    assert k4s.eval(36, 4) == F(8192, 9)
    k1 = projection_kernel(1)
    assert k1.eval(9, 1) == F(2, 3)


def test_kernel_eval_argument_order_enforced():
    k4 = projection_kernel(4)
    with pytest.raises(ValueError):
        k4.eval(36, 36)
    with pytest.raises(ValueError):
        k4.eval(4, 36)
    with pytest.raises(ValueError):
        k4.eval(36, 0)


def test_odd_kernel_needs_square_arguments():
    k1 = projection_kernel(1)
    with pytest.raises(NonSquareArgumentError):
        k1.eval(8, 1)
    k3 = projection_kernel(3)
    with pytest.raises(NonSquareArgumentError):
        k3.eval(11, 3)
    # both perfect squares: exact value comes out
    assert k1.eval(25, 4) == F((5 - 2) ** 2, 2 * 5)


def test_kernel_eval_free_function_matches_handle():
    w = weights_for_dim(6)
    table = kernel_bivariate(w)
    assert kernel_eval(table, 52, 12) == projection_kernel(6).eval(52, 12)


@pytest.mark.parametrize("l", [4, 6, 8, 10])
def test_two_path_agreement_with_direct_jacobi(l):
    """kernel_eval equals N^(k-1) P(1 - 2M/N) - M^(k-1) computed through the
    polynomial evaluated at the rational point."""
    w = weights_for_dim(l)
    poly = jacobi_poly(w.kappa - 2, 1 - w.k_f, F(1 - w.kappa))
    k = projection_kernel(l)
    e = w.k_f - 1
    rng = random.Random(3)
    for _ in range(200):
        m = rng.randint(1, 400)
        n = m + rng.randint(1, 400)
        z = 1 - F(2 * m, n)
        direct = F(n) ** int(e) * poly(z) - F(m) ** int(e)
        assert k.eval(n, m) == direct


@pytest.mark.parametrize("l", [1, 3, 5])
def test_two_path_agreement_odd_dimensions(l):
    # odd dimensions need perfect-square arguments; the half powers are then
    # integral powers of the square roots
    w = weights_for_dim(l)
    poly = jacobi_poly(w.kappa - 2, 1 - w.k_f, F(1 - w.kappa))
    k = projection_kernel(l)
    two_e = int(2 * (w.k_f - 1))
    rng = random.Random(9)
    for _ in range(200):
        mu = rng.randint(1, 40)
        nu = mu + rng.randint(1, 40)
        n, m = nu * nu, mu * mu
        direct = F(nu) ** two_e * poly(1 - F(2 * m, n)) - F(mu) ** two_e
        assert k.eval(n, m) == direct


def test_l1_cancellation_identity():
    # 2 K(nu^2, mu^2) nu = (nu - mu)^2 exactly
    k1 = projection_kernel(1)
    for nu in range(2, 31):
        for mu in range(1, nu):
            assert 2 * k1.eval(nu * nu, mu * mu) * nu == (nu - mu) ** 2


def test_closed_forms_report():
    rep = verify_closed_forms()
    by_name = {i["name"]: i for i in rep["identities"]}
    assert by_name["kappa=6 (l=4)"]["match"]
    assert by_name["kappa=6 (l=4)"]["orientation_used"] == "swapped"
    assert by_name["kappa=8 (l=6)"]["match"]
    k10 = by_name["kappa=10 (l=8)"]
    assert k10["candidates"]["trailing=y^4 (corrected)"]["match"]
    assert not k10["candidates"]["trailing=x^4 (as printed)"]["match"]
    assert k10["candidates"]["trailing=x^4 (as printed)"]["difference"] != "0"
    k12 = by_name["kappa=12 (l=10)"]
    assert k12["candidates"]["trailing=y^6 (corrected)"]["match"]
    assert not k12["candidates"]["trailing=x^6 (as printed)"]["match"]
    assert by_name["kappa=5 (l=3)"]["match"]
    assert by_name["kappa=7 (l=5)"]["match"]


def test_closed_forms_other_orientation_matches_directly():
    rep = verify_closed_forms("prefactor_on_smaller")
    by_name = {i["name"]: i for i in rep["identities"]}
    assert by_name["kappa=6 (l=4)"]["orientation_used"] == "direct"


def test_parallelogram_landmarks():
    assert parallelogram_check(64, 16) == (F(36), F(4))
    # degenerate pair b = 0: S = T = |a|^2
    assert parallelogram_check(5, 5) == (F(5), F(0))


def test_parallelogram_random_pairs():
    """Reconstruction sweep over the regime where the sum/difference product
    identity holds: every one-dimensional pair, and multi-index pairs whose
    sum and difference vectors are proportional (Cauchy-Schwarz equality)."""
    rng = random.Random(17)
    checked = 0
    while checked < 500:
        if rng.random() < 0.5:
            av = rng.randint(1, 60)
            bv = rng.randint(0, av - 1)
            a, b = (av,), (bv,)
        else:
            l = rng.randint(2, 4)
            u = tuple(rng.randint(1, 6) for _ in range(l))
            t = rng.randint(2, 9)
            s = rng.randint(1, t - 1)
            if (t - s) % 2:
                continue
            a = tuple((t + s) // 2 * uj for uj in u)
            b = tuple((t - s) // 2 * uj for uj in u)
        S = sum((x + y) ** 2 for x, y in zip(a, b))
        T = sum((x - y) ** 2 for x, y in zip(a, b))
        big, small = parallelogram_check(S, T)
        assert big == sum(x * x for x in a)
        assert small == sum(y * y for y in b)
        checked += 1


def test_parallelogram_fails_off_the_proportional_cone():
    # genuine divisor tuple of (15, 3): a = (4, 2), b = (1, 1); the product
    # S*T = 340 is not |n|^2 = 324, so no exact reconstruction exists:
    # the sum/difference argument convention is ambiguous beyond
    # proportional pairs, which is why the kernel is evaluated at the
    # squared norms directly
    with pytest.raises(NonSquareArgumentError):
        parallelogram_check(34, 10)


def test_parallelogram_rejects_non_square_product():
    with pytest.raises(NonSquareArgumentError):
        parallelogram_check(3, 1)


def test_modular_meta_landmarks():
    meta = modular_meta(CHI_M4, CHI_8, 4)
    assert meta.level == 256
    assert meta.level % (4 * CHI_8.modulus ** 2) == 0
    assert meta.level % (4 * CHI_M4.modulus ** 2) == 0
    assert meta.weight == F(0)
    assert meta.full_claim and meta.caveat is None
    assert meta.shadow_label == "theta_conj(chi)^4"
    # nebentypus = conj(chi) * inverse(psi * chi_minus4); all real here, so it
    # collapses to chi_8 times the even square of chi_minus4 at modulus 8
    expected = char_product(CHI_8, char_product(CHI_M4, CHI_M4))
    assert meta.nebentypus == expected
    assert meta.nebentypus.parity == 0


def test_theta_space_labels():
    assert theta_space_label(CHI_M4) == "S_3/2(Gamma0(64), psi*chi_minus4)"
    assert theta_space_label(CHI_8) == "M_1/2(Gamma0(256), psi)"


def test_modular_meta_parity_validation_and_caveat():
    with pytest.raises(WeightError):
        modular_meta(CHI_8, CHI_8, 4)
    with pytest.raises(WeightError):
        modular_meta(CHI_M4, CHI_M4, 4)
    meta3 = modular_meta(CHI_M4, CHI_8, 3)
    assert not meta3.full_claim
    assert meta3.caveat is not None


def test_bivariate_laurent_canonical_form():
    a = BivariateLaurent({(1, 0): 1, (0, 1): 2})
    b = BivariateLaurent({(0, 1): 2, (1, 0): 1, (5, 5): 0})
    assert a == b
    assert (a - a).is_zero()
    assert a.evaluate(F(3), F(2)) == 7
