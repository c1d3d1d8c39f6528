"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Tolerances are pinned here, verbatim from the statements they verify.  Two
sub-clauses are strict expected failures with the measured evidence recorded
in their messages: the large-time trend clause for the wave sine kernel
(whose operator norm genuinely grows linearly in t, attained by wave packets
at frequency ~ 1/(4t); the stated envelope holds only for |t| <= 1, the
regime the local solver actually uses), and the quintic certificate bound
(iterated products leave the battery, whose pair maximum 0.6124 understates
the chain constants 0.667..0.693 reached by narrowing Gaussians; in closed
form the quintic Gaussian certificate is sqrt(6/5)/2^(5/2) = 0.1936 > 1.1 *
0.6124^4 = 0.1547).
"""

import itertools
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from modspace.grid import GridSpec, SampledField, fourier_image, l2_norm, sample_builtin, scale
from modspace.norms import ModParams, mod_norm, mod_norm_many
from modspace.propagators import FAMILIES, PropagatorKind, apply as papply, bound_ratio
from modspace.series import lipschitz_bound, norm_certificate, preset_series
from modspace.solver import CauchyData, SolverConfig, continue_solution, residual, solve_window, step_horizon
from modspace.verify import check_algebra, counterexample_probe, make_battery

P110 = ModParams(1, 1, 0)
CUBIC = preset_series("cubic")


def report(criterion, ok, detail):
    print(f"[criterion {criterion:>2}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def grid():
    return GridSpec(1, 512, 32.0)


@pytest.fixture(scope="module")
def battery(grid):
    return make_battery(grid, seed=7, size=20)


@pytest.fixture(scope="module")
def algebra_report(battery):
    return check_algebra(battery, P110, n_pairs=50)


@pytest.fixture(scope="module")
def solver_grid():
    return GridSpec(1, 256, 16.0)


@pytest.fixture(scope="module")
def measured_c1(solver_grid):
    small = make_battery(solver_grid, seed=7, size=8)
    return max(bound_ratio("schrodinger", [1.0], small.fields, P110).rows[0][1], 1e-12)


def test_criterion_01_gaussian_norm_oracles(grid):
    g = sample_builtin("gaussian", grid)
    n11 = mod_norm(g, ModParams(1, 1, 0))
    n22 = mod_norm(g, ModParams(2, 2, 0))
    ok = abs(n11 / math.sqrt(2) - 1) < 0.01 and abs(n22 / 2**-0.5 - 1) < 0.01
    report(1, ok, f"(1,1) norm {n11:.6f} vs sqrt(2); (2,2) norm {n22:.6f} vs 2^-1/2")


def test_criterion_02_stft_oracle(grid):
    from modspace.stft import stft

    g = sample_builtin("gaussian", grid)
    V = stft(g, g).values
    x = grid.points()[:, 0]
    w = grid.dual_points()[:, 0]
    oracle = (
        2**-0.5
        * np.exp(-np.pi * (x[None, :] ** 2 + w[:, None] ** 2) / 2)
        * np.exp(-1j * np.pi * x[None, :] * w[:, None])
    )
    err = np.abs(V - oracle).max()
    report(2, err <= 1e-7, f"max abs error vs closed-form Gaussian STFT = {err:.2e}")


def _battery_isometry_dev(battery, p):
    params = ModParams(p, p, 0)
    norms = battery.norms(params)
    dev = 0.0
    for name in battery.names():
        if norms[name] == 0:
            continue
        dev = max(dev, abs(mod_norm(fourier_image(battery.fields[name]), params) / norms[name] - 1))
    return dev


def test_criterion_03_fourier_isometry(battery):
    floor = 1e-12  # the discrete identity is exact: deviations at/below are roundoff
    refined = battery.refined()
    devs = {}
    for p in (1.0, 2.0):
        d1 = _battery_isometry_dev(battery, p)
        d2 = _battery_isometry_dev(refined, p)
        devs[p] = (d1, d2)
    small = all(d1 < 1e-4 for d1, _ in devs.values())
    shrink = all(d2 <= max(d1 / 4, floor) for d1, d2 in devs.values())
    # non-vacuous shrink demonstration where the deviation is genuine:
    # at Nyquist 2 the window aliasing is measurable and collapses on refining
    coarse = GridSpec(1, 64, 16.0)
    f = sample_builtin("triangle", coarse)
    d_coarse = abs(mod_norm(fourier_image(f), P110) / mod_norm(f, P110) - 1)
    f2 = sample_builtin("triangle", coarse.refined())
    d_fine = abs(mod_norm(fourier_image(f2), P110) / mod_norm(f2, P110) - 1)
    demo = d_coarse > floor and d_fine <= d_coarse / 4
    ok = small and shrink and demo
    report(3, ok, f"deviations {devs}; coarse-grid shrink {d_coarse:.1e} -> {d_fine:.1e}")


def test_criterion_04_algebra(battery, algebra_report):
    rep = algebra_report
    control = check_algebra(battery, ModParams(2, 2, 0), n_pairs=50)
    ok = (
        rep.passed is True
        and np.isfinite(rep.measured_constant)
        and rep.stability < 0.05
        and control.outside_hypothesis
        and control.passed is not False
    )
    report(4, ok, f"C = {rep.measured_constant:.4f}, stability {rep.stability:.2%}; "
                  f"(2,2,0) control flagged outside-hypothesis")


def test_criterion_05_convolution_bound(battery):
    from modspace.verify import check_convolution

    rep = check_convolution(battery)
    ok = rep.passed is True and rep.measured_constant <= 1 + 1e-6
    report(5, ok, f"max ratio |k*f| / (|k|_1 |f|) = {rep.measured_constant:.9f}")


T_GRID = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)


def _trend(rows):
    normalized = [r[2] for r in rows]
    return normalized[-1] <= 1.2 * max(normalized[:3])


@pytest.fixture(scope="module")
def multiplier_reports(battery):
    return {fam: bound_ratio(fam, T_GRID, battery.fields, P110) for fam in FAMILIES}


def test_criterion_06_multiplier_bounds(battery, multiplier_reports):
    # t = 0 identity kinds reproduce the input exactly
    f = battery.fields["gaussian"]
    for fam in ("schrodinger", "wave_cosine", "kg_cosine"):
        err = np.abs(papply(PropagatorKind(fam, 0.0), f).values - f.values).max()
        assert err <= 1e-12, f"{fam} at t=0 deviates by {err:.2e}"
    trends = {fam: _trend(multiplier_reports[fam].rows) for fam in FAMILIES if fam != "wave_sine"}
    ok = all(trends.values())
    report(6, ok, f"no upward trend for {sorted(trends)} "
                  f"(wave_sine large-t clause tracked separately as an expected failure)")


@pytest.mark.xfail(
    strict=True,
    reason="wave sine kernel: operator norm grows ~ 2t/pi (wave packets at frequency "
    "1/(4t) attain sin peak over 2 pi |xi|), so the (1+t^2)^(n/4) envelope fails for "
    "t in {2, 5, 10}; it holds on |t| <= 1, the regime the solver uses",
)
def test_criterion_06_wave_sine_large_t(multiplier_reports):
    rows = multiplier_reports["wave_sine"].rows
    ok = _trend(rows)
    report(6, ok, f"wave_sine normalized ratios {[round(r[2], 3) for r in rows]}")


def test_criterion_06_wave_sine_bounded_on_solver_horizon(battery):
    # the regime the fixed-point solver uses: |t| <= 1 where the stated
    # envelope does hold with constant ~ 1
    rep = bound_ratio("wave_sine", (0.1, 0.25, 0.5, 0.75, 1.0), battery.fields, P110)
    cn = rep.empirical_constant
    assert cn <= 1.0 + 1e-9, f"wave_sine constant on [0,1] is {cn:.4f}"
    print(f"[criterion  6] PASS: wave_sine envelope constant on |t|<=1 is {cn:.4f}")


def test_criterion_07_free_evolution_oracle(solver_grid, measured_c1):
    from modspace.series import RealEntireSeries

    zero = RealEntireSeries.from_coeffs({})
    u0 = sample_builtin("gaussian", solver_grid)
    cfg = SolverConfig(nonlinearity=zero, c1=measured_c1, params=P110,
                       quadrature_step=0.05, picard_tol=1e-10)
    sol = continue_solution(CauchyData("nls", u0), cfg, 0.1)
    x = solver_grid.axis()
    a = 1 + 4j * np.pi * 0.1
    closed = a**-0.5 * np.exp(-np.pi * x**2 / a)
    err_fwd = np.abs(sol.states[-1].values - closed).max()
    back = continue_solution(CauchyData("nls", sol.states[-1], t0=0.1), cfg, 0.0)
    err_back = np.abs(back.states[-1].values - u0.values).max()
    ok = err_fwd <= 1e-8 and err_back <= 1e-8
    report(7, ok, f"free-evolution error {err_fwd:.2e}; backward roundtrip {err_back:.2e}")


def test_criterion_08_contraction_and_horizons(solver_grid, measured_c1):
    # horizon formulas against hand substitution
    hor = step_horizon(1.0, CUBIC, 1.0)
    hand_T1 = min(1.0, 1.0 / (2.0 * 1.0 * CUBIC.g_factor()(2.0)))
    hand_T2 = min(1.0, 1.0 / (4.0 * 1.0 * CUBIC.derivative_majorant_sum(4.0, 4.0)))
    formulas_ok = abs(hor.T1 - hand_T1) <= 1e-12 and abs(hor.T2 - hand_T2) <= 1e-12

    u0 = scale(sample_builtin("gaussian", solver_grid), 0.2)
    cfg = SolverConfig(nonlinearity=CUBIC, c1=measured_c1, params=P110,
                       quadrature_step=0.001, picard_tol=1e-11, safety=0.9)
    sol = continue_solution(CauchyData("nls", u0), cfg, 0.02)
    factors = [w.contraction_factor for w in sol.windows]
    horizon_ok = all(
        w.T_used <= 0.9 * min(w.T1, w.T2) + 1e-15 for w in sol.windows[:-1]
    )
    ok = formulas_ok and horizon_ok and all(f <= 0.55 for f in factors)
    report(8, ok, f"T1/T2 match to 1e-12; max contraction {max(factors):.4f} over "
                  f"{len(factors)} windows at T = 0.9 min(T1, T2)")


def test_criterion_09_quadrature_order(solver_grid, measured_c1):
    data = CauchyData("nls", scale(sample_builtin("gaussian", solver_grid), 0.5))
    n0 = float(mod_norm_many([data.u0], P110)[0])
    hor = step_horizon(n0, CUBIC, measured_c1)

    def defect(divisions):
        cfg = SolverConfig(nonlinearity=CUBIC, c1=measured_c1, params=P110,
                           quadrature_step=hor.T / divisions, picard_tol=1e-13)
        path, _ = solve_window(data, cfg)
        return residual(path, data, cfg, quad_step=abs(path.step) / 2)

    r1, r2 = defect(8), defect(16)
    ratio = r1 / r2
    report(9, 3.5 <= ratio <= 4.5, f"residual {r1:.3e} -> {r2:.3e}, ratio {ratio:.3f}")


def test_criterion_10_small_data_perturbation(solver_grid, measured_c1):
    def deviation(eps):
        data = CauchyData("nls", scale(sample_builtin("gaussian", solver_grid), eps))
        cfg = SolverConfig(nonlinearity=CUBIC, c1=measured_c1, params=P110,
                           quadrature_step=0.002, picard_tol=1e-13)
        sol = continue_solution(data, cfg, 0.1)
        x = solver_grid.axis()
        a = 1 + 4j * np.pi * sol.times[-1]
        free = eps * a**-0.5 * np.exp(-np.pi * x**2 / a)
        return l2_norm(SampledField(solver_grid, sol.states[-1].values - free))

    ratio = deviation(0.1) / deviation(0.05)
    report(10, 7.0 <= ratio <= 9.0, f"deviation ratio at eps vs eps/2 = {ratio:.3f} (cubic => ~8)")


def test_criterion_11_counterexample_signature():
    rep = counterexample_probe()
    tri = rep.details["increments"]["triangle"]
    jmp = rep.details["increments"]["jump"]
    tri_ok = tri[-1] < tri[0] / 4
    jump_ok = all(d >= 0.1 for d in jmp) and all(
        abs(jmp[i + 1] / jmp[i] - 1) <= 0.30 for i in range(len(jmp) - 1)
    )
    ok = rep.passed is True and tri_ok and jump_ok
    report(11, ok, f"triangle increments {[f'{d:.4f}' for d in tri]} (Cauchy); "
                   f"jump increments {[f'{d:.4f}' for d in jmp]} (log growth)")


def _certificate_max(battery, F):
    best = 0.0
    for name in battery.names():
        cert = norm_certificate(F, battery.fields[name], P110)
        if cert.rhs > 0:
            best = max(best, cert.constant)
    return best


@pytest.mark.parametrize("preset", ["quadratic", "cubic"])
def test_criterion_12_composition_certificate(battery, algebra_report, preset):
    F = preset_series(preset)
    bound = algebra_report.measured_constant ** (F.degree - 1) * 1.1
    c1 = _certificate_max(battery, F)
    c2 = _certificate_max(battery.refined(), F)
    stable = abs(c2 / c1 - 1) < 0.10
    ok = c1 <= bound and stable
    report(12, ok, f"{preset}: max certificate C = {c1:.4f} <= {bound:.4f}, "
                   f"refinement change {abs(c2 / c1 - 1):.2%}")


@pytest.mark.xfail(
    strict=True,
    reason="quintic: iterated products leave the battery; the Gaussian chain needs pair "
    "constants up to 0.693 while the battery pair maximum is 0.6124, and in closed form "
    "the certificate 0.1936 exceeds 1.1 * 0.6124^4 = 0.1547",
)
def test_criterion_12_composition_certificate_quintic(battery, algebra_report):
    F = preset_series("quintic")
    bound = algebra_report.measured_constant ** (F.degree - 1) * 1.1
    c1 = _certificate_max(battery, F)
    report(12, c1 <= bound, f"quintic: max certificate C = {c1:.4f} vs bound {bound:.4f}")


def test_criterion_13_lipschitz(battery, algebra_report):
    pairs = list(itertools.combinations_with_replacement(battery.names(), 2))[:50]
    refined = battery.refined()
    ok = True
    messages = []
    for preset in ("quadratic", "cubic", "quintic"):
        F = preset_series(preset)
        bound = algebra_report.measured_constant ** (F.degree - 1) * 1.1

        def max_constant(bat):
            best = 0.0
            for a, b in pairs:
                rec = lipschitz_bound(F, bat.fields[a], bat.fields[b], P110)
                if rec.rhs > 0:
                    best = max(best, rec.constant)
            return best

        c1 = max_constant(battery)
        c2 = max_constant(refined)
        stable = abs(c2 / c1 - 1) < 0.10 if c1 > 0 else True
        ok = ok and c1 <= bound and stable
        messages.append(f"{preset}: C = {c1:.2e} <= {bound:.3f}")
    report(13, ok, "; ".join(messages))


def test_criterion_14_torus_restriction(battery):
    from modspace.verify import torus_restriction_check

    worst = 0.0
    for name in ("gaussian", "plane_wave", "triangle"):
        rep = torus_restriction_check(battery.fields[name])
        worst = max(worst, rep.stability)
        assert rep.passed is True, f"{name}: restriction constant unstable ({rep.stability:.2%})"
    report(14, worst < 0.10, f"restriction constants stable under N->2N (worst {worst:.2%})")


def test_criterion_15_determinism(tmp_path):
    def run(out):
        cmd = [sys.executable, "-m", "modspace.cli", "--out", str(out), "--seed", "7",
               "verify", "--suite", "all", "--n", "256", "--L", "16", "--battery-size", "12"]
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=600)
        assert proc.returncode == 0, proc.stderr
        return (out / "report.json").read_bytes()

    a = run(tmp_path / "run1")
    b = run(tmp_path / "run2")
    ok = a == b
    report(15, ok, f"verify --suite all --seed 7 twice: {len(a)} bytes, byte-identical = {ok}")
