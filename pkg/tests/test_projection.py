from fractions import Fraction

import pytest

from holoproj.characters import char_kronecker
from holoproj.kernel import WeightError
from holoproj.projection import (
    CalibrationInstance,
    OddDimensionError,
    ProjectionConfig,
    calibrate_constants,
    compositions,
    eisenstein_e2,
    full_pairs_side,
    lemma_gap_witnesses,
    ordered_pairs_side,
    residual_report,
    sigma_side,
)
from holoproj.rings import cyc
from holoproj.smalldiv import CharacterParityError, MultiIndex, sigma_sm

F = Fraction
CHI_M4 = char_kronecker(-4)
CHI_8 = char_kronecker(8)
CHI_5 = char_kronecker(5)


def cfg_for(l, rmax, modes=("ordered",), B=None, chi=CHI_8, **kw):
    return ProjectionConfig(CHI_M4, chi, l, rmax, modes=modes, B=B, **kw)


def test_config_validation():
    with pytest.raises(WeightError):
        cfg_for(2, 10)
    with pytest.raises(CharacterParityError):
        ProjectionConfig(CHI_8, CHI_8, 4, 10)
    with pytest.raises(CharacterParityError):
        ProjectionConfig(CHI_M4, CHI_M4, 4, 10)
    with pytest.raises(ValueError):
        cfg_for(4, 10, modes=("full",), B=5)  # B < rmax
    with pytest.raises(ValueError):
        cfg_for(4, 10, modes=("sideways",))


def test_compositions():
    assert list(compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
    assert list(compositions(3, 3)) == [(1, 1, 1)]
    assert list(compositions(2, 3)) == []


def test_sigma_side_structural_vanishing_l4():
    s = sigma_side(cfg_for(4, 13))
    for r in range(1, 12):
        assert s.coeff(r).is_zero()
    # r = 12 is (3,3,3,3) only, killed by psi(2^4) = 0 mod 4
    assert s.coeff(12).is_zero()


def test_sigma_side_first_nonzero_rows_l4():
    s = sigma_side(cfg_for(4, 40))
    nonzero = {e: c for e, c in s.nonzero_items()}
    assert set(nonzero) == {32, 40}
    assert nonzero[32] == cyc(F(-8192, 729))
    assert nonzero[40] == cyc(F(-4500000, 371293))


def test_sigma_coefficient_matches_composition_sum():
    # the table-walking fast path must equal, exactly, the straightforward
    # sum of sigma_sm over compositions
    from holoproj.projection import sigma_coefficient

    for chi in (CHI_8, CHI_5):
        cfg = cfg_for(4, 24, chi=chi)
        kernel = cfg.kernel()
        for r in range(1, 25):
            direct = cyc(0)
            for parts in compositions(r, 4):
                direct = direct + sigma_sm(MultiIndex(parts), CHI_M4, chi, kernel)
            assert sigma_coefficient(cfg, kernel, r) == direct, (chi.modulus, r)


def test_sigma_side_l1_matches_pointwise_sigma_sm():
    cfg = cfg_for(1, 60)
    kernel = cfg.kernel()
    s = sigma_side(cfg)
    for r in range(1, 61):
        assert s.coeff(r) == sigma_sm(MultiIndex((r,)), CHI_M4, CHI_8, kernel)


def test_ordered_side_l1_row8():
    # pairs (mu, nu) with nu^2 - mu^2 = 8: only (1, 3);
    # term psi(3) * 3 * chi(1) * K(9, 1) = (-3) * (2/3) = -2
    cfg = cfg_for(1, 8)
    o = ordered_pairs_side(cfg)
    assert o.coeff(8) == cyc(-2)


def test_ordered_side_l4_minimum_exponent():
    cfg = cfg_for(4, 12)
    o = ordered_pairs_side(cfg)
    for r in range(1, 12):
        assert o.coeff(r).is_zero()
    # r = 12: single pair ((1,1,1,1), (2,2,2,2)), killed by psi(16) = 0
    assert o.coeff(12).is_zero()


@pytest.mark.parametrize("l,rmax,chi", [
    (4, 30, CHI_8), (4, 24, CHI_5), (6, 20, CHI_5), (8, 40, CHI_8), (8, 40, CHI_5),
])
def test_bijection_sigma_equals_ordered(l, rmax, chi):
    cfg = cfg_for(l, rmax, chi=chi)
    assert sigma_side(cfg).agrees_with(ordered_pairs_side(cfg), 1, rmax)


def test_bijection_over_complex_character_values():
    # an order-4 odd character drives the whole pipeline through genuinely
    # cyclotomic (non-rational) coefficients; the bijection must still be an
    # exact identity in Q(i)
    from holoproj.characters import char_from_table
    from holoproj.rings import CyclotomicNumber

    i = CyclotomicNumber.zeta(4)
    quartic = char_from_table(5, [cyc(0), cyc(1), i, -i, cyc(-1)])
    assert quartic.parity == 1 and quartic.order == 4
    cfg = ProjectionConfig(quartic, CHI_8, 4, 16, modes=("ordered",))
    s = sigma_side(cfg)
    o = ordered_pairs_side(cfg)
    assert s.agrees_with(o, 1, 16)
    assert s.coeff(12) == cyc(F(-243, 256))
    assert s.coeff(16) == F(32768, 50421) * i  # purely imaginary row


def test_bijection_has_nonzero_rows_for_chi5():
    cfg = cfg_for(4, 24, chi=CHI_5)
    s = sigma_side(cfg)
    assert not s.is_zero_on_window()
    assert not s.coeff(20).is_zero()


def test_wrong_placement_breaks_the_bijection():
    from holoproj.smalldiv import CharacterPlacement

    cfg = cfg_for(4, 32, placement=CharacterPlacement.CHI_ON_LARGER)
    s = sigma_side(cfg)
    o = ordered_pairs_side(cfg)
    assert s.coeff(32) != o.coeff(32)


def test_one_dim_closure_exact():
    cfg = cfg_for(1, 100, modes=("ordered", "full"), B=100 * 100)
    s = sigma_side(cfg)
    f = full_pairs_side(cfg)
    assert s.agrees_with(f.series, 1, 100)


def test_full_side_l4_row5_is_zero():
    # alpha(7) = 0 for chi_8 (the only type (2,1,1,1) has chi_8(2) = 0)
    cfg = cfg_for(4, 5, modes=("full",), B=64)
    f = full_pairs_side(cfg)
    assert f.series.coeff(5).is_zero()


def test_full_side_sources_agree():
    cfg = cfg_for(4, 16, modes=("full",), B=200)
    direct = full_pairs_side(cfg, source="direct")
    powered = full_pairs_side(cfg, source="power")
    assert direct.series == powered.series


def test_full_side_rejects_odd_dimensions_above_one():
    cfg = ProjectionConfig(CHI_M4, CHI_8, 3, 8, modes=("full",), B=64)
    with pytest.raises(OddDimensionError):
        full_pairs_side(cfg)


def test_full_side_tail_delta_definition():
    cfg = cfg_for(4, 16, modes=("full",), B=512)
    res = full_pairs_side(cfg)
    res_half = full_pairs_side(cfg, B=256)
    for r in range(1, 17):
        assert res.tail_delta[r] == res.series.coeff(r) - res_half.series.coeff(r)


def test_lemma_gap_witness_row5():
    # the known witness shape: m a permutation of (1,2,1,1), n of (3,1,1,1),
    # norm difference 5 but no componentwise domination
    cfg = cfg_for(4, 5, modes=("full",), B=64)
    pairs = lemma_gap_witnesses(cfg, 5, cap=10)
    assert any(
        sorted(p["m"]) == [1, 1, 1, 2] and sorted(p["n"]) == [1, 1, 1, 3]
        for p in pairs
    )
    for p in pairs:
        n_sq = sum(x * x for x in p["n"])
        m_sq = sum(x * x for x in p["m"])
        assert n_sq - m_sq == 5
        assert not all(nj > mj for nj, mj in zip(p["n"], p["m"]))


def test_residual_report_l1_confirmed():
    cfg = cfg_for(1, 40, modes=("ordered", "full"), B=1600)
    rep = residual_report(cfg)
    assert rep.verdicts["ordered_residual"] == "zero"
    assert rep.verdicts["full_residual"] == "confirmed"
    for row in rep.rows:
        assert row.residual_ordered.is_zero()
        assert row.residual_full.is_zero()


def test_residual_report_l4_discrepancy_documented():
    cfg = cfg_for(4, 16, modes=("ordered", "full"), B=512)
    rep = residual_report(cfg, b_schedule=[128, 512])
    assert rep.verdicts["ordered_residual"] == "zero"
    assert rep.verdicts["full_residual"] == "discrepancy documented"
    row8 = rep.rows[7]
    assert not row8.residual_full.is_zero()
    assert rep.witnesses, "nonzero residual rows must come with witness pairs"
    assert len(rep.schedule) == 2


def test_residual_report_worker_independence():
    cfg = cfg_for(4, 12, modes=("ordered", "full"), B=128)
    rep1 = residual_report(cfg, workers=1)
    rep2 = residual_report(cfg, workers=2)
    assert rep1.to_json_obj(include_timestamp=False) == rep2.to_json_obj(include_timestamp=False)


def test_eisenstein_expansion():
    e2 = eisenstein_e2(10)
    assert e2.coeff(0) == cyc(1)
    assert e2.coeff(1) == cyc(-24)
    assert e2.coeff(4) == cyc(-168)
    assert e2.coeff(6) == cyc(-288)
    assert e2.min_nonzero_exponent() == 0


def test_calibrate_classical_d_both_characters():
    res = calibrate_constants(CalibrationInstance("classical-d", CHI_M4, CHI_M4),
                              probe_count=12, verify_rows=120)
    assert res.consistent and not res.failures
    assert res.scalars["alpha"] == cyc(0)
    assert res.scalars["C"] == cyc(-1)
    res8 = calibrate_constants(CalibrationInstance("classical-d", CHI_8, CHI_8),
                               probe_count=12, verify_rows=120)
    assert res8.consistent
    assert res8.scalars["alpha"] == cyc(0)
    assert res8.scalars["C"] == cyc(1)


def test_calibrate_classical_d2():
    res = calibrate_constants(CalibrationInstance("classical-d2", CHI_M4, CHI_8),
                              probe_count=10, verify_rows=100)
    assert res.consistent
    assert res.scalars["C"] == cyc(2)


def test_calibrate_kernel_1dim_returns_unit_scalar():
    res = calibrate_constants(CalibrationInstance("kernel-1dim", CHI_M4, CHI_8),
                              probe_count=10, verify_rows=60)
    assert res.consistent
    assert res.scalars["C"] == cyc(1)


def test_calibrate_validates_instances():
    with pytest.raises(ValueError):
        CalibrationInstance("classical-d", CHI_M4, CHI_8)  # needs psi = chi
    with pytest.raises(ValueError):
        CalibrationInstance("unknown", CHI_M4, CHI_8)
    with pytest.raises(ValueError):
        calibrate_constants(CalibrationInstance("classical-d", CHI_M4, CHI_M4),
                            probe_count=2)  # needs >= unknowns + 1


def test_calibrate_underdetermined_probes_flagged():
    # kernel-1dim rows vanish for r < 8 with these characters, so a probe
    # window that ends before the first nonzero row cannot pin the scalar
    res = calibrate_constants(CalibrationInstance("kernel-1dim", CHI_M4, CHI_8),
                              probe_count=5, verify_rows=0)
    assert res.underdetermined
    assert not res.consistent
    assert res.scalars == {}
