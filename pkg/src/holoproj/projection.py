"""Both sides of the cancellation identity, computed independently, and the
residual ledger comparing them.

sigma_side sums the multi-index small divisor function over compositions.
ordered_pairs_side enumerates componentwise-dominated lattice pairs directly
(never via divisors).  full_pairs_side collapses the unrestricted pair sum
through the theta-power coefficients, truncated at a norm bound B with
doubling-based tail diagnostics.  The ordered sum equals the sigma sum by an
exact bijection; whether the full sum does too is precisely the claim under
test, so residual_report asserts nothing about it and just ledgers the
numbers.
"""

from __future__ import annotations

import datetime as _dt
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .characters import DirichletCharacter, char_conjugate
from .kernel import ProjectionKernel, _pow_half, projection_kernel, weights_for_dim
from .qseries import QSeries
from .rings import CyclotomicNumber, cyc, value_to_json
from .smalldiv import (
    CharacterPlacement,
    divisor_sum,
    require_twist_pair,
    sigma_sm_classical,
)
from .theta import theta_power_direct, theta_power_series


@dataclass(frozen=True)
class ProjectionConfig:
    psi: DirichletCharacter
    chi: DirichletCharacter
    l: int
    rmax: int
    modes: tuple = ("ordered", "full")
    B: int | None = None
    placement: CharacterPlacement = CharacterPlacement.PSI_ON_LARGER
    orientation: str = "prefactor_on_larger"

    def __post_init__(self):
        require_twist_pair(self.psi, self.chi)
        weights_for_dim(self.l)  # rejects l = 2
        if self.rmax < 1:
            raise ValueError("rmax must be >= 1")
        unknown = set(self.modes) - {"ordered", "full"}
        if unknown:
            raise ValueError(f"unknown modes {sorted(unknown)}")
        if "full" in self.modes:
            if self.B is None:
                raise ValueError("full mode needs a norm bound B")
            if self.B < self.rmax:
                raise ValueError(f"need B >= rmax, got B={self.B} < {self.rmax}")

    def kernel(self) -> ProjectionKernel:
        return projection_kernel(self.l, self.orientation)


def compositions(total: int, parts: int):
    """All tuples of `parts` positive integers summing to `total`, in
    lexicographic order."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def sigma_entry_table(cfg: ProjectionConfig, rmax: int) -> dict:
    """Per entry value n <= rmax: the surviving divisor substitutions as
    (a^2, b^2, weight) with weight the per-entry character factor.  Complete
    multiplicativity makes the product of per-entry weights equal the
    multi-index weight, so sigma sums can walk these tables instead of
    re-deriving divisor tuples per multi-index."""
    from .smalldiv import small_divisors

    if cfg.placement == CharacterPlacement.PSI_ON_LARGER:
        on_larger, lam_larger = cfg.psi, cfg.psi.parity
        on_smaller, lam_smaller = cfg.chi, cfg.chi.parity
    else:
        on_larger, lam_larger = cfg.chi, cfg.chi.parity
        on_smaller, lam_smaller = cfg.psi, cfg.psi.parity
    table = {}
    for n in range(1, rmax + 1):
        entries = []
        for d in small_divisors(n):
            q = n // d
            a, b = (q + d) // 2, (q - d) // 2
            ca = on_larger(a)
            if ca.is_zero():
                continue
            cb = on_smaller(b)
            if cb.is_zero():
                continue
            entries.append((a * a, b * b, ca * cb * (a ** lam_larger * b ** lam_smaller)))
        if entries:
            table[n] = entries
    return table


def sigma_coefficient(cfg: ProjectionConfig, kernel: ProjectionKernel, r: int,
                      table: dict | None = None) -> CyclotomicNumber:
    """Sum of sigma_sm over the multi-indices with entry sum r, walking the
    per-entry divisor-substitution tables (equal, term for term, to summing
    sigma_sm over compositions, a consistency the tests pin down)."""
    if table is None:
        table = sigma_entry_table(cfg, r)
    l = cfg.l
    values = sorted(v for v in table if v <= r)
    if not values or r < l * values[0]:
        return cyc(0)
    vmin = values[0]
    total = cyc(0)

    def walk(j, remaining, a_sq, b_sq, weight):
        nonlocal total
        if j == l - 1:
            for a2, b2, w in table.get(remaining, ()):
                total = total + weight * w * cyc(kernel.eval(a_sq + a2, b_sq + b2))
            return
        budget = remaining - (l - 1 - j) * vmin
        for v in values:
            if v > budget:
                break
            for a2, b2, w in table[v]:
                walk(j + 1, remaining - v, a_sq + a2, b_sq + b2, weight * w)

    walk(0, r, 0, 0, cyc(1))
    return total


def sigma_side(cfg: ProjectionConfig) -> QSeries:
    """Coefficient of q^r: sum of sigma_sm over multi-indices with entry sum r."""
    kernel = cfg.kernel()
    table = sigma_entry_table(cfg, cfg.rmax)
    return QSeries(
        1, cfg.rmax,
        {r: sigma_coefficient(cfg, kernel, r, table) for r in range(1, cfg.rmax + 1)},
    )


def ordered_coefficient(cfg: ProjectionConfig, kernel: ProjectionKernel, r: int) -> CyclotomicNumber:
    """Sum over pairs (m, n) with n_j > m_j for all j and |n|^2 - |m|^2 = r.

    Domination forces sum(m) <= (r - l)/2, so the sum is finite; n is
    enumerated by pruned descent over the remaining square budget.  This path
    never looks at divisors.
    """
    l = cfg.l
    psi, chi = cfg.psi, cfg.chi
    lam_psi, lam_chi = psi.parity, chi.parity
    total = cyc(0)
    for msum in range(l, (r - l) // 2 + 1):
        for m in compositions(msum, l):
            cm = chi(_product(m))
            if cm.is_zero():
                continue
            M = sum(x * x for x in m)
            N = M + r
            min_tail = [0] * (l + 1)
            for j in range(l - 1, -1, -1):
                min_tail[j] = min_tail[j + 1] + (m[j] + 1) ** 2

            def descend(j, budget, prod, acc):
                if j == l:
                    if budget == 0:
                        acc.append(prod)
                    return
                n = m[j] + 1
                while n * n + min_tail[j + 1] <= budget:
                    if not psi(n).is_zero():
                        descend(j + 1, budget - n * n, prod * n, acc)
                    n += 1

            found: list[int] = []
            descend(0, N, 1, found)
            if not found:
                continue
            weight = kernel.eval(N, M)
            base = cm * cyc(weight * _product(m) ** lam_chi)
            for prod in found:
                cn = psi(prod)
                total = total + cn * base * (prod ** lam_psi)
    return total


def _product(t):
    out = 1
    for x in t:
        out *= x
    return out


def ordered_pairs_side(cfg: ProjectionConfig) -> QSeries:
    kernel = cfg.kernel()
    return QSeries(
        1, cfg.rmax,
        {r: ordered_coefficient(cfg, kernel, r) for r in range(1, cfg.rmax + 1)},
    )


class OddDimensionError(ValueError):
    """Full mode is exact only for even l (or l = 1, where both collapsed
    sequences are square-supported)."""


@dataclass(frozen=True)
class FullSideResult:
    series: QSeries
    b_used: int
    tail_delta: dict  # r -> CyclotomicNumber, change from B/2 to B


def _collapsed_sequences(cfg: ProjectionConfig, B: int, source: str):
    """alpha: theta_chi^l coefficients to B; beta: theta_psi^l to B + rmax."""
    if source == "direct":
        alpha = theta_power_direct(cfg.chi, cfg.l, B)
        beta = theta_power_direct(cfg.psi, cfg.l, B + cfg.rmax)
    elif source == "power":
        alpha = theta_power_series(cfg.chi, cfg.l, B)
        beta = theta_power_series(cfg.psi, cfg.l, B + cfg.rmax)
    else:
        raise ValueError(f"unknown coefficient source {source!r}")
    return alpha, beta


def full_pairs_side(cfg: ProjectionConfig, B: int | None = None, source: str = "direct") -> FullSideResult:
    """Collapsed unrestricted-pair sum: coefficient of q^r is

        sum over M <= B of alpha(M) beta(M + r) K(M + r, M)

    with alpha, beta the theta-power coefficients of the chi and psi sides.
    tail_delta records, per r, the change between bounds B/2 and B.
    """
    if cfg.l != 1 and cfg.l % 2 != 0:
        raise OddDimensionError(
            f"l = {cfg.l}: collapsed norms are not perfect squares, no exact evaluation"
        )
    B = cfg.B if B is None else B
    if B is None:
        raise ValueError("full mode needs a norm bound B")
    if B < cfg.rmax:
        raise ValueError(f"need B >= rmax, got B={B} < {cfg.rmax}")
    kernel = cfg.kernel()
    alpha, beta = _collapsed_sequences(cfg, B, source)
    half = B // 2

    full_at_b: dict[int, CyclotomicNumber] = {}
    full_at_half: dict[int, CyclotomicNumber] = {}
    support = [(M, aM) for M, aM in alpha.nonzero_items() if M <= B]
    for r in range(1, cfg.rmax + 1):
        acc = cyc(0)
        acc_half = cyc(0)
        for M, aM in support:
            bN = beta.coeff(M + r)
            if bN.is_zero():
                continue
            term = aM * bN * cyc(kernel.eval(M + r, M))
            acc = acc + term
            if M <= half:
                acc_half = acc_half + term
        full_at_b[r] = acc
        full_at_half[r] = acc_half

    series = QSeries(1, cfg.rmax, full_at_b)
    deltas = {r: full_at_b[r] - full_at_half[r] for r in range(1, cfg.rmax + 1)}
    return FullSideResult(series=series, b_used=B, tail_delta=deltas)


def lemma_gap_witnesses(cfg: ProjectionConfig, r: int, cap: int = 3, max_entry_sum: int = 16):
    """Pairs (m, n) with |n|^2 - |m|^2 = r that are NOT componentwise
    dominated: lattice points the unrestricted (full) summation range covers
    but the substitution's ordered range does not.  Each witness carries its
    character weights; a pair may sit in the gap with weight zero.  Returns
    up to `cap` examples, smallest entry sum of m first; the scan is bounded
    so reports stay cheap."""
    l = cfg.l
    out = []
    for msum in range(l, max_entry_sum + 1):
        if len(out) >= cap:
            break
        for m in compositions(msum, l):
            if len(out) >= cap:
                break
            N = sum(x * x for x in m) + r

            def descend(j, budget, tup):
                if len(out) >= cap:
                    return
                if j == l:
                    if budget == 0:
                        n = tup
                        if all(nj > mj for nj, mj in zip(n, m)):
                            return
                        out.append({
                            "m": list(m),
                            "n": list(n),
                            "chi_weight": value_to_json(cfg.chi(_product(m))),
                            "psi_weight": value_to_json(cfg.psi(_product(n))),
                        })
                    return
                v = 1
                while v * v + (l - 1 - j) <= budget:
                    descend(j + 1, budget - v * v, tup + (v,))
                    v += 1

            descend(0, N, ())
    return out


@dataclass
class ResidualRow:
    r: int
    sigma: CyclotomicNumber
    ordered: CyclotomicNumber | None
    full: CyclotomicNumber | None
    tail_delta: CyclotomicNumber | None
    residual_ordered: CyclotomicNumber | None
    residual_full: CyclotomicNumber | None


@dataclass
class ResidualReport:
    config: dict
    rows: list
    schedule: list      # per B: {"B": int, "rows": [{"r", "full", "tail_delta"}]}
    witnesses: list
    verdicts: dict
    timestamp: str | None

    def to_json_obj(self, include_timestamp: bool = True) -> dict:
        def v(x):
            return None if x is None else value_to_json(x)

        obj = {
            "config": self.config,
            "rows": [
                {
                    "r": row.r,
                    "sigma": v(row.sigma),
                    "ordered": v(row.ordered),
                    "full": v(row.full),
                    "tail_delta": v(row.tail_delta),
                    "residual_ordered": v(row.residual_ordered),
                    "residual_full": v(row.residual_full),
                }
                for row in self.rows
            ],
            "schedule": self.schedule,
            "lemma_gap_witnesses": self.witnesses,
            "verdicts": self.verdicts,
        }
        if include_timestamp and self.timestamp is not None:
            obj["timestamp"] = self.timestamp
        return obj

    def csv_rows(self):
        yield ("r", "sigma", "ordered", "full", "tail_delta",
               "residual_ordered", "residual_full")
        for row in self.rows:
            yield (
                row.r,
                _csv_value(row.sigma),
                _csv_value(row.ordered),
                _csv_value(row.full),
                _csv_value(row.tail_delta),
                _csv_value(row.residual_ordered),
                _csv_value(row.residual_full),
            )


def _csv_value(x):
    if x is None:
        return ""
    j = value_to_json(x)
    return j if isinstance(j, str) else repr(j)


def _embed_magnitude(z: CyclotomicNumber) -> float:
    """|z| as a float via the embedding zeta_e -> exp(2 pi i / e); used only
    for verdict wording, never for the exact ledger values."""
    import cmath
    acc = 0j
    for k, c in enumerate(z.coords):
        acc += float(c) * cmath.exp(2j * cmath.pi * k / z.order)
    return abs(acc)


_ROW_CTX = None


def _row_task(r: int):
    cfg, kernel, want_ordered, table = _ROW_CTX
    sig = sigma_coefficient(cfg, kernel, r, table)
    orde = ordered_coefficient(cfg, kernel, r) if want_ordered else None
    return r, sig, orde


def residual_report(cfg: ProjectionConfig, b_schedule=None, workers: int = 1) -> ResidualReport:
    """Full ledger: per exponent, sigma side, ordered side, full side with
    tail diagnostics, and the two residuals.  residual_ordered is asserted
    nowhere here (it is data; the CLI's exit code asserts it).  Identical
    configs produce identical reports for any worker count.
    """
    global _ROW_CTX
    kernel = cfg.kernel()
    want_ordered = "ordered" in cfg.modes
    want_full = "full" in cfg.modes

    rs = list(range(1, cfg.rmax + 1))
    _ROW_CTX = (cfg, kernel, want_ordered, sigma_entry_table(cfg, cfg.rmax))
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                computed = list(pool.map(_row_task, rs, chunksize=max(1, len(rs) // (4 * workers))))
        else:
            computed = [_row_task(r) for r in rs]
    finally:
        _ROW_CTX = None
    sigma = {r: s for r, s, _ in computed}
    ordered = {r: o for r, _, o in computed} if want_ordered else {}

    schedule_out = []
    full_final = None
    if want_full:
        bounds = list(b_schedule) if b_schedule else [cfg.B]
        for B in bounds:
            res = full_pairs_side(cfg, B=B)
            schedule_out.append({
                "B": B,
                "rows": [
                    {
                        "r": r,
                        "full": value_to_json(res.series.coeff(r)),
                        "tail_delta": value_to_json(res.tail_delta[r]),
                    }
                    for r in rs
                ],
            })
            full_final = res

    rows = []
    ordered_all_zero = True
    full_all_within = True
    any_full_residual = False
    for r in rs:
        o = ordered.get(r)
        f = full_final.series.coeff(r) if full_final else None
        delta = full_final.tail_delta[r] if full_final else None
        res_o = sigma[r] - o if o is not None else None
        res_f = sigma[r] - f if f is not None else None
        if res_o is not None and not res_o.is_zero():
            ordered_all_zero = False
        if res_f is not None and not res_f.is_zero():
            any_full_residual = True
            if _embed_magnitude(res_f) > 4.0 * _embed_magnitude(delta):
                full_all_within = False
        rows.append(ResidualRow(r, sigma[r], o, f, delta, res_o, res_f))

    witnesses = []
    if want_full and cfg.l > 1:
        interesting = [row.r for row in rows if row.residual_full is not None
                       and not row.residual_full.is_zero()]
        for r in interesting[:8]:
            w = lemma_gap_witnesses(cfg, r, cap=3)
            if w:
                witnesses.append({"r": r, "pairs": w})

    verdicts = {}
    if want_ordered:
        verdicts["ordered_residual"] = "zero" if ordered_all_zero else "NONZERO"
    if want_full:
        if not any_full_residual or full_all_within:
            verdicts["full_residual"] = "confirmed"
        else:
            verdicts["full_residual"] = "discrepancy documented"

    config_obj = {
        "psi": {"modulus": cfg.psi.modulus, "values": [value_to_json(v) for v in cfg.psi.values]},
        "chi": {"modulus": cfg.chi.modulus, "values": [value_to_json(v) for v in cfg.chi.values]},
        "l": cfg.l,
        "rmax": cfg.rmax,
        "modes": list(cfg.modes),
        "B": cfg.B,
        "b_schedule": [e["B"] for e in schedule_out] or None,
        "placement": cfg.placement.value,
        "orientation": cfg.orientation,
    }
    return ResidualReport(
        config=config_obj,
        rows=rows,
        schedule=schedule_out,
        witnesses=witnesses,
        verdicts=verdicts,
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(),
    )


def eisenstein_e2(N: int) -> QSeries:
    """1 - 24 sum_{n>=1} sigma_1(n) q^n, exact to exponent N."""
    if N < 0:
        raise ValueError("need N >= 0")
    coeffs = {0: cyc(1)}
    for n in range(1, N + 1):
        coeffs[n] = cyc(-24 * divisor_sum(n, 1))
    return QSeries(0, N, coeffs)


# -- calibrate-then-verify ------------------------------------------------------

CAL_FAMILIES = ("classical-d", "classical-d2", "kernel-1dim")


@dataclass(frozen=True)
class CalibrationInstance:
    """One-dimensional cancellation instance.

    classical-d:   weight d,   psi = chi non-trivial; unknowns (alpha, C)
                   where alpha scales the weight-2 Eisenstein correction and
                   C the projection sum.
    classical-d2:  weight d^2, psi odd, chi even non-trivial; unknown C.
    kernel-1dim:   this package's kernel-weighted sigma at l = 1; unknown C.
    """

    family: str
    psi: DirichletCharacter
    chi: DirichletCharacter

    def __post_init__(self):
        if self.family not in CAL_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "classical-d":
            if self.psi != self.chi or self.psi.is_trivial():
                raise ValueError("classical-d needs psi = chi, non-trivial")
        else:
            require_twist_pair(self.psi, self.chi)


@dataclass
class CalibrationResult:
    family: str
    scalars: dict
    consistent: bool
    underdetermined: bool
    probe_rows: int
    verified_rows: int
    failures: list

    def to_json_obj(self):
        return {
            "family": self.family,
            "scalars": {k: value_to_json(v) for k, v in self.scalars.items()},
            "consistent": self.consistent,
            "underdetermined": self.underdetermined,
            "probe_rows": self.probe_rows,
            "verified_rows": self.verified_rows,
            "failures": self.failures,
        }


def _calibration_equation(inst: CalibrationInstance, r: int):
    """Row (coefficients-of-unknowns, rhs) of the linear system at exponent r.

    The cancellation reads lhs(r) = sum_k scalar_k * basis_k(r); rows are
    returned as ([basis_k(r)...], lhs(r)).
    """
    psi, chi = inst.psi, inst.chi
    if inst.family == "classical-d":
        lam = psi.parity
        k_f = Fraction(3, 2) - lam  # weight of the corrected quotient
        shadow = char_conjugate(psi)
        proj = cyc(0)
        for mu in range(1, (r - 1) // 2 + 1):  # nu > mu forces r >= 2 mu + 1
            N = mu * mu + r
            nu = isqrt(N)
            if nu * nu != N:
                continue
            am = shadow(mu)
            bn = psi(nu)
            if am.is_zero() or bn.is_zero():
                continue
            kern = _pow_half(N, int(2 * (k_f - 1))) - _pow_half(mu * mu, int(2 * (k_f - 1)))
            proj = proj + am * (mu ** lam) * bn * (nu ** lam) * cyc(kern)
        e2 = cyc(-24 * divisor_sum(r, 1))
        sigma = sigma_sm_classical(r, psi, chi, power=1)
        # sigma(r) + alpha e2(r) - C proj(r) = 0
        return [e2, -proj], -sigma

    if inst.family == "classical-d2":
        lam_psi, lam_chi = psi.parity, chi.parity
        kernel = projection_kernel(1, "prefactor_on_larger")
        proj = cyc(0)
        for mu in range(1, (r - 1) // 2 + 1):
            N = mu * mu + r
            nu = isqrt(N)
            if nu * nu != N:
                continue
            am = chi(mu)
            bn = psi(nu)
            if am.is_zero() or bn.is_zero():
                continue
            kern = kernel.eval(N, mu * mu)
            proj = proj + am * (mu ** lam_chi) * bn * (nu ** lam_psi) * cyc(kern)
        sigma = sigma_sm_classical(r, psi, chi, power=2)
        return [proj], sigma

    # kernel-1dim
    cfg = ProjectionConfig(inst.psi, inst.chi, 1, r, modes=("full",), B=max(r * r, r))
    kernel = cfg.kernel()
    sigma = sigma_coefficient(cfg, kernel, r)
    full = full_pairs_side(cfg, B=cfg.B).series.coeff(r)
    return [full], sigma


def calibrate_constants(inst: CalibrationInstance, probe_count: int = 12,
                        verify_rows: int = 120) -> CalibrationResult:
    """Solve the unknown scalars from the first probe_count cancellation
    equations exactly, then verify the cancellation on every computed row
    (the probes and the following verify_rows coefficients).  An inconsistent
    system is a finding, not an error: the offending rows land in
    ``failures``.
    """
    names = {"classical-d": ["alpha", "C"], "classical-d2": ["C"], "kernel-1dim": ["C"]}[inst.family]
    n_unknown = len(names)
    if probe_count < n_unknown + 1:
        raise ValueError(f"probe_count must be >= {n_unknown + 1}")

    equations = [_calibration_equation(inst, r) for r in range(1, probe_count + 1)]
    solution = _solve_from_pivots(equations, n_unknown)
    if solution is None:
        return CalibrationResult(inst.family, {}, False, True,
                                 probe_count, 0, failures=[])

    failures = []
    for r in range(1, probe_count + verify_rows + 1):
        basis, rhs = equations[r - 1] if r <= probe_count else _calibration_equation(inst, r)
        acc = cyc(0)
        for coeff, scal in zip(basis, solution):
            acc = acc + coeff * scal
        if acc != rhs:
            failures.append(r)
    return CalibrationResult(
        inst.family,
        dict(zip(names, solution)),
        consistent=not failures,
        underdetermined=False,
        probe_rows=probe_count,
        verified_rows=verify_rows,
        failures=failures,
    )


def _solve_from_pivots(equations, n_unknown):
    """Exact Gaussian elimination over the cyclotomic field using the first
    independent probe rows; returns None when the probes cannot determine all
    unknowns.  Inconsistency is not detected here; the verification pass
    checks every row against the returned solution."""
    work = [([b for b in basis], rhs) for basis, rhs in equations]
    pivot_rows = {}
    for col in range(n_unknown):
        pivot = None
        for idx, (basis, _) in enumerate(work):
            if idx not in pivot_rows and not basis[col].is_zero():
                pivot = idx
                break
        if pivot is None:
            return None
        pivot_rows[pivot] = col
        pb, prhs = work[pivot]
        inv = pb[col].inverse()
        for idx, (basis, rhs) in enumerate(work):
            if idx == pivot or basis[col].is_zero():
                continue
            factor = basis[col] * inv
            work[idx] = (
                [b - factor * p for b, p in zip(basis, pb)],
                rhs - factor * prhs,
            )
    solution = [cyc(0)] * n_unknown
    for idx, col in pivot_rows.items():
        basis, rhs = work[idx]
        solution[col] = rhs * basis[col].inverse()
    return solution
