import numpy as np
import pytest

from modspace.grid import SampledField, l2_norm, sample_builtin, scale
from modspace.norms import ModParams, mod_norm, mod_norm_many
from modspace.propagators import PropagatorKind, apply as papply
from modspace.series import RealEntireSeries, preset_series
from modspace.solver import (
    CauchyData,
    PicardError,
    SolverConfig,
    WindowPath,
    continue_solution,
    duhamel_map,
    free_window,
    residual,
    solve_window,
    step_horizon,
)

ZERO = RealEntireSeries.from_coeffs({})
CUBIC = preset_series("cubic")
P110 = ModParams(1, 1, 0)


@pytest.fixture(scope="module")
def u0(g256):
    return sample_builtin("gaussian", g256)


def cfg_for(F, dt=0.002, tol=1e-12, c1=2.0, **kw):
    return SolverConfig(nonlinearity=F, c1=c1, params=P110, quadrature_step=dt, picard_tol=tol, **kw)


def test_horizon_hand_substitution():
    hor = step_horizon(1.0, CUBIC, 1.0)
    # M = 2; G(x) = 4x^2 so G(2) = 16; derivative majorants sum to 12 x^2 at
    # (x, x), so D(4) = 192
    assert hor.M == pytest.approx(2.0, abs=1e-12)
    assert hor.T1 == pytest.approx(1.0 / 32.0, abs=1e-12)
    assert hor.T2 == pytest.approx(1.0 / 768.0, abs=1e-12)
    assert hor.T == pytest.approx(0.9 / 768.0, abs=1e-12)


def test_horizon_unit_case():
    F = RealEntireSeries.from_coeffs({(1, 0): 0.5, (0, 1): 0.5})  # G == 1
    hor = step_horizon(1.0, F, 1.0)
    assert hor.T1 == pytest.approx(0.5, abs=1e-12)


def test_horizon_zero_series_uses_cap():
    hor = step_horizon(3.0, ZERO, 2.0, horizon_cap=0.7)
    assert hor.T == 0.7 and hor.T1 == 0.7 and hor.T2 == 0.7


def test_horizon_decreasing_in_norm():
    horizons = [step_horizon(n, CUBIC, 2.0).T for n in (0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(horizons, horizons[1:]))
    assert horizons[-1] > 0


def test_duhamel_free_for_zero_series(g256, u0):
    data = CauchyData("nls", u0)
    cfg = cfg_for(ZERO, dt=0.01)
    fp = free_window(data, cfg, 0.05)
    rng = np.random.default_rng(0)
    trial = WindowPath(fp.equation, fp.grid, fp.t0, fp.step, fp.taus,
                       rng.standard_normal(fp.values.shape) + 0j)
    out = duhamel_map(data, cfg, trial)
    assert np.abs(out.values - fp.values).max() < 1e-12
    # the free path is the fixed point
    again = duhamel_map(data, cfg, fp)
    assert np.abs(again.values - fp.values).max() < 1e-14


def test_duhamel_zero_trial_gives_free(g256, u0):
    data = CauchyData("nls", u0)
    cfg = cfg_for(CUBIC, dt=0.01)
    fp = free_window(data, cfg, 0.05)
    zero_trial = WindowPath(fp.equation, fp.grid, fp.t0, fp.step, fp.taus, np.zeros_like(fp.values))
    out = duhamel_map(data, cfg, zero_trial)
    assert np.abs(out.values - fp.values).max() < 1e-14


def test_free_solution_matches_closed_form(g256, u0):
    data = CauchyData("nls", u0)
    sol = continue_solution(data, cfg_for(ZERO, dt=0.05, tol=1e-10), 0.1)
    assert sol.reached_t_end and not sol.blew_up
    x = g256.axis()
    a = 1 + 4j * np.pi * 0.1
    closed = a**-0.5 * np.exp(-np.pi * x**2 / a)
    assert np.abs(sol.states[-1].values - closed).max() < 1e-8


def test_time_reversal(g256, u0):
    cfg = cfg_for(ZERO, dt=0.05, tol=1e-10)
    fwd = continue_solution(CauchyData("nls", u0), cfg, 0.1)
    back = continue_solution(CauchyData("nls", fwd.states[-1], t0=0.1), cfg, 0.0)
    assert np.abs(back.states[-1].values - u0.values).max() < 1e-8


def test_window_contraction_and_confinement(g256, u0):
    data = CauchyData("nls", scale(u0, 0.2))
    cfg = cfg_for(CUBIC, dt=0.001, tol=1e-11)
    path, rec = solve_window(data, cfg)
    assert rec.contraction_factor <= 0.55
    assert rec.max_norm <= rec.M + 1e-9
    assert rec.T1 > 0 and rec.T2 > 0 and rec.T_used <= 0.9 * min(rec.T1, rec.T2) + 1e-15
    # fixed-point property at the solve quadrature
    assert residual(path, data, cfg) <= 2 * cfg.picard_tol


def test_quadrature_second_order(g256, u0):
    data = CauchyData("nls", scale(u0, 0.5))
    n0 = float(mod_norm_many([data.u0], P110)[0])
    hor = step_horizon(n0, CUBIC, 2.0)

    def defect(divisions):
        cfg = cfg_for(CUBIC, dt=hor.T / divisions, tol=1e-13)
        path, _ = solve_window(data, cfg)
        return residual(path, data, cfg, quad_step=abs(path.step) / 2)

    r1, r2 = defect(8), defect(16)
    assert 3.5 <= r1 / r2 <= 4.5


def test_small_data_cubic_deviation_scaling(g256, u0):
    def deviation(eps):
        data = CauchyData("nls", scale(u0, eps))
        sol = continue_solution(data, cfg_for(CUBIC, dt=0.002, tol=1e-13), 0.1)
        x = g256.axis()
        a = 1 + 4j * np.pi * sol.times[-1]
        free = eps * a**-0.5 * np.exp(-np.pi * x**2 / a)
        return l2_norm(SampledField(g256, sol.states[-1].values - free))

    ratio = deviation(0.1) / deviation(0.05)
    assert 7.0 <= ratio <= 9.0


def test_uniqueness_surrogate(g256, u0):
    data = CauchyData("nls", scale(u0, 0.3))
    cfg = cfg_for(CUBIC, dt=0.002, tol=1e-12)
    pa, _ = solve_window(data, cfg, initial="free")
    pb, _ = solve_window(data, cfg, initial="zero")
    gap = max(
        mod_norm_many([SampledField(g256, a - b) for a, b in zip(pa.values, pb.values)], P110)
    )
    assert gap <= 10 * cfg.picard_tol


def test_continuation_metadata(g256, u0):
    data = CauchyData("nls", scale(u0, 0.2))
    sol = continue_solution(data, cfg_for(CUBIC, dt=0.002, tol=1e-11), 0.02)
    assert sol.reached_t_end and not sol.blew_up
    assert sol.times[0] == 0.0 and all(b > a for a, b in zip(sol.times, sol.times[1:]))
    assert len(sol.windows) == len(sol.times) - 1
    for rec in sol.windows:
        assert rec.contraction_factor < 1.0 and rec.picard_iters >= 1


def test_defocusing_small_data_reaches_unit_time(g256, u0):
    # opposite-sign cubic, small datum: the continuation crosses t = 1 with
    # every window's metadata recorded and contracting
    defocusing = RealEntireSeries(-CUBIC.table)
    data = CauchyData("nls", scale(u0, 0.05))
    cfg = cfg_for(defocusing, dt=0.01, tol=1e-10)
    sol = continue_solution(data, cfg, 1.0)
    assert sol.reached_t_end and not sol.blew_up
    assert all(w.contraction_factor < 1.0 for w in sol.windows)
    # the norm grows like the free envelope, so horizons shrink monotonically
    spans = [w.T_used for w in sol.windows[:-1]]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(spans, spans[1:]))
    norms = sol.state_norms(P110)
    envelope = (1 + sol.times[-1] ** 2) ** 0.25
    assert norms[-1] / norms[0] < 3.0 * envelope  # free-like growth, no assumed constant


def test_blowup_flag(g256, u0):
    cfg = cfg_for(CUBIC, dt=0.002, tol=1e-10, blowup_norm_factor=1.0 - 1e-12)
    sol = continue_solution(CauchyData("nls", u0), cfg, 0.5)
    assert sol.blew_up and not sol.reached_t_end
    assert sol.times[-1] < 0.5


def test_window_floor_triggers_blowup_flag(g256, u0):
    cfg = cfg_for(CUBIC, dt=0.002, tol=1e-10, window_floor=10.0)
    sol = continue_solution(CauchyData("nls", u0), cfg, 0.5)
    assert sol.blew_up and not sol.reached_t_end


def test_picard_failure_after_halvings(g256, u0):
    # an absurd iteration budget cannot converge: 10 halvings then PicardError
    cfg = SolverConfig(nonlinearity=CUBIC, c1=2.0, params=P110, quadrature_step=0.002,
                       picard_tol=1e-300, picard_max_iter=1)
    with pytest.raises(PicardError):
        solve_window(CauchyData("nls", u0), cfg)


def test_wave_free_evolution_multiwindow(g256, u0):
    u1 = sample_builtin("random_bandlimited", g256, {"seed": 4, "bandwidth": 2.0})
    cfg = cfg_for(ZERO, dt=0.05, tol=1e-10, horizon_cap=0.13)
    for eq, cos_k, sin_k in (("nlw", "wave_cosine", "wave_sine"), ("nlkg", "kg_cosine", "kg_sine")):
        sol = continue_solution(CauchyData(eq, u0, u1), cfg, 0.5)
        assert len(sol.windows) >= 4  # the cap forces several restarts
        t = sol.times[-1]
        direct = papply(PropagatorKind(cos_k, t), u0).values + papply(PropagatorKind(sin_k, t), u1).values
        assert np.abs(sol.states[-1][0].values - direct).max() < 1e-10


def test_wave_velocity_handoff(g256, u0):
    u1 = sample_builtin("random_bandlimited", g256, {"seed": 4, "bandwidth": 2.0})
    cfg = cfg_for(ZERO, dt=0.05, tol=1e-10, horizon_cap=0.13)
    sol = continue_solution(CauchyData("nlw", u0, u1), cfg, 0.5)
    t, dt = sol.times[-1], 1e-5

    def u_at(tt):
        return (
            papply(PropagatorKind("wave_cosine", tt), u0).values
            + papply(PropagatorKind("wave_sine", tt), u1).values
        )

    centered = (u_at(t + dt) - u_at(t - dt)) / (2 * dt)
    assert np.abs(sol.states[-1][1].values - centered).max() < 1e-7


def test_nonlinear_wave_window(g256, u0):
    u1 = sample_builtin("random_bandlimited", g256, {"seed": 4, "bandwidth": 2.0})
    data = CauchyData("nlkg", scale(u0, 0.3), scale(u1, 0.3))
    cfg = cfg_for(CUBIC, dt=0.001, tol=1e-11)
    path, rec = solve_window(data, cfg)
    assert rec.contraction_factor <= 0.55
    assert residual(path, data, cfg) <= 2 * cfg.picard_tol


def test_wave_two_sided_solving(g256, u0):
    # forward through several windows, then backward from (u, u_t): the
    # second-order flows are solved on both sides of the datum
    u1 = sample_builtin("random_bandlimited", g256, {"seed": 4, "bandwidth": 2.0})
    cfg = cfg_for(ZERO, dt=0.05, tol=1e-10, horizon_cap=0.11)
    for eq in ("nlw", "nlkg"):
        fwd = continue_solution(CauchyData(eq, u0, u1), cfg, 0.3)
        u_end, ut_end = fwd.states[-1]
        back = continue_solution(CauchyData(eq, u_end, ut_end, t0=fwd.times[-1]), cfg, 0.0)
        assert back.reached_t_end
        assert np.abs(back.states[-1][0].values - u0.values).max() < 1e-9
        assert np.abs(back.states[-1][1].values - u1.values).max() < 1e-8


def test_nonlinear_wave_backward_roundtrip(g256, u0):
    u1 = sample_builtin("random_bandlimited", g256, {"seed": 4, "bandwidth": 2.0})
    data = CauchyData("nlw", scale(u0, 0.2), scale(u1, 0.2))
    cfg = cfg_for(CUBIC, dt=0.002, tol=1e-12)
    fwd = continue_solution(data, cfg, 0.01)
    u_end, ut_end = fwd.states[-1]
    back = continue_solution(CauchyData("nlw", u_end, ut_end, t0=0.01), cfg, 0.0)
    assert np.abs(back.states[-1][0].values - data.u0.values).max() < 1e-6


def test_backward_nonlinear_consistency(g256, u0):
    # forward then backward through the nonlinear flow returns the datum
    data = CauchyData("nls", scale(u0, 0.2))
    cfg = cfg_for(CUBIC, dt=0.001, tol=1e-12)
    fwd = continue_solution(data, cfg, 0.01)
    back = continue_solution(CauchyData("nls", fwd.states[-1], t0=0.01), cfg, 0.0)
    assert np.abs(back.states[-1].values - data.u0.values).max() < 1e-7


def test_cauchy_data_validation(g256, u0):
    with pytest.raises(ValueError):
        CauchyData("nls", u0, u0)
    with pytest.raises(ValueError):
        CauchyData("nlw", u0)
    with pytest.raises(ValueError):
        CauchyData("heat", u0)
