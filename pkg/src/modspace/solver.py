"""Picard fixed-point local solver for NLS/NLW/NLKG in Duhamel integral form.

A window [t0, t0 + T] is discretized at half-steps of the quadrature step h;
the Duhamel time integral uses the composite midpoint rule (midpoints are the
odd nodes), with a single left-rectangle correction on the trailing half
interval of odd targets, so the map stays second order at every node.  The
integral equations solved are

    nls    J(u) = S(t) u0 - i int_0^t S(t - tau) F(u(tau)) dtau
    nlw    J(u) = C(t) u0 + K(t) u1 - int_0^t K(t - tau) F(u(tau)) dtau
    nlkg   J(u) = C(t) u0 + K(t) u1 + int_0^t K(t - tau) F(u(tau)) dtau

with K the sine kernel over the dispersion rate and C its cosine partner.
Sine/cosine addition formulas turn each integral into two running sums with
time-independent kernels, so one sweep costs O(nodes) symbol applications.

Window horizons come from the contraction analysis: with M = 2 c1 |data|,
T1 = min(cap, 1/(2 c1 G(M))) controls the invariant ball and
T2 = min(cap, 1/(4 c1 D(2M))) the contraction factor 1/2, where G is the
majorant factor F_maj(x, x) = x G(x) and D the derivative-majorant sum.  The
measured multiplier constant c1 is configuration, never assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, SampledField, _backward_values, _forward_values
from .norms import ModParams, mod_norm_many
from .propagators import _radius
from .series import RealEntireSeries

__all__ = [
    "EQUATIONS",
    "CauchyData",
    "SolverConfig",
    "Horizon",
    "WindowPath",
    "WindowRecord",
    "SolutionPath",
    "PicardError",
    "step_horizon",
    "free_window",
    "duhamel_map",
    "solve_window",
    "continue_solution",
    "residual",
]

EQUATIONS = ("nls", "nlw", "nlkg")


class PicardError(RuntimeError):
    """Window iteration failed after all halvings; maps to CLI exit code 2."""


@dataclass(frozen=True)
class CauchyData:
    equation: str
    u0: SampledField
    u1: SampledField | None = None
    t0: float = 0.0

    def __post_init__(self):
        if self.equation not in EQUATIONS:
            raise ValueError(f"equation must be one of {EQUATIONS}, got {self.equation!r}")
        if self.equation == "nls":
            if self.u1 is not None:
                raise ValueError("nls carries no velocity datum u1")
        else:
            if self.u1 is None:
                raise ValueError(f"{self.equation} requires both u0 and u1")
            if self.u1.grid != self.u0.grid:
                raise ValueError("u0 and u1 must share a grid")
        if self.u0.domain != "space":
            raise ValueError("Cauchy data must be space-domain fields")


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of the fixed-point solver; c1 is the measured multiplier constant."""

    nonlinearity: RealEntireSeries
    c1: float
    params: ModParams = ModParams(1, 1, 0)
    quadrature_step: float = 0.01
    picard_tol: float = 1e-10
    picard_max_iter: int = 40
    horizon_cap: float = 1.0
    safety: float = 0.9
    contraction_ceiling: float = 0.55
    blowup_norm_factor: float = 1e6
    window_floor: float = 1e-8

    def __post_init__(self):
        if not (self.c1 > 0):
            raise ValueError("c1 must be positive")
        if not (self.picard_tol > 0 and self.quadrature_step > 0):
            raise ValueError("picard_tol and quadrature_step must be positive")
        if not (0 < self.safety <= 1):
            raise ValueError("safety must lie in (0, 1]")


@dataclass(frozen=True)
class Horizon:
    M: float
    T1: float
    T2: float
    T: float


def step_horizon(
    norm_u0: float,
    F: RealEntireSeries,
    c1: float,
    norm_u1: float = 0.0,
    horizon_cap: float = 1.0,
    safety: float = 0.9,
) -> Horizon:
    """Ball radius and window horizons from the contraction analysis.

    M = 2 c1 (|u0| + |u1|); T1 = min(cap, 1/(2 c1 G(M))) keeps the iteration
    inside the ball, T2 = min(cap, 1/(4 c1 D(2M))) forces contraction factor
    <= 1/2, and the step is safety * min(T1, T2).  A vanishing nonlinearity
    has no constraint: the window is the cap itself.
    """
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    F.require_constant_free("step_horizon")
    if F.is_zero:
        return Horizon(M=2.0 * c1 * (norm_u0 + norm_u1), T1=horizon_cap, T2=horizon_cap, T=horizon_cap)
    M = 2.0 * c1 * (norm_u0 + norm_u1)
    gm = float(F.g_factor()(M))
    dm = F.derivative_majorant_sum(2.0 * M, 2.0 * M)
    T1 = horizon_cap if gm <= 0 else min(horizon_cap, 1.0 / (2.0 * c1 * gm))
    T2 = horizon_cap if dm <= 0 else min(horizon_cap, 1.0 / (4.0 * c1 * dm))
    return Horizon(M=M, T1=T1, T2=T2, T=safety * min(T1, T2))


# ---------------------------------------------------------------------------
# Window paths and the discrete Duhamel map
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class WindowPath:
    """Trial path on one window: values at the half-step lattice t0 + taus."""

    equation: str
    grid: GridSpec
    t0: float
    step: float  # signed full quadrature step h
    taus: np.ndarray  # 0, h/2, h, ..., m h
    values: np.ndarray  # (2m+1, *grid.shape)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.taus

    @property
    def span(self) -> float:
        return abs(self.taus[-1])

    def node_fields(self):
        return [SampledField(self.grid, v, "space") for v in self.values]

    def final_values(self) -> np.ndarray:
        return self.values[-1]

    def at(self, tau_targets) -> np.ndarray:
        """Values at local times, 4-point Lagrange interpolation in t.

        Interpolation error O(delta^4) sits far below the O(h^2) quadrature
        defects this is used to measure.
        """
        taus = np.atleast_1d(np.asarray(tau_targets, dtype=float))
        delta = self.step / 2.0
        nt = len(self.taus)
        width = min(4, nt)
        pos = taus / delta
        out = np.zeros((len(taus),) + self.values.shape[1:], dtype=np.complex128)
        for i, p in enumerate(pos):
            near = int(round(p))
            if abs(p - near) < 1e-9 and 0 <= near < nt:
                out[i] = self.values[near]
                continue
            base = min(max(int(math.floor(p)) - 1, 0), nt - width)
            stencil = np.arange(base, base + width)
            weights = np.ones(width)
            for a in range(width):
                for b in range(width):
                    if a != b:
                        weights[a] *= (p - stencil[b]) / (stencil[a] - stencil[b])
            out[i] = np.tensordot(weights, self.values[stencil], axes=(0, 0))
        return out


def _dispersion_rate(equation: str, grid: GridSpec) -> np.ndarray:
    r = _radius(grid)
    if equation == "nls":
        return 4.0 * np.pi**2 * r**2  # phase rate of exp(-i a t)
    if equation == "nlw":
        return 2.0 * np.pi * r
    return np.sqrt(1.0 + (2.0 * np.pi * r) ** 2)


def _sine_kernel(a: np.ndarray, taus: np.ndarray) -> np.ndarray:
    # sin(a tau)/a = tau sinc(a tau / pi), finite at a = 0
    return taus.reshape((-1,) + (1,) * a.ndim) * np.sinc(np.multiply.outer(taus, a) / np.pi)


def _free_hat(equation, a, taus, u0hat, u1hat):
    if equation == "nls":
        return np.exp(-1j * np.multiply.outer(taus, a)) * u0hat
    cos = np.cos(np.multiply.outer(taus, a))
    return cos * u0hat + _sine_kernel(a, taus) * u1hat


def _duhamel_hat(equation, a, taus, h, u0hat, u1hat, Fhat):
    """Spectral values of J(u) at every node; Fhat may be None for F == 0."""
    out = _free_hat(equation, a, taus, u0hat, u1hat)
    if Fhat is None:
        return out
    nt = len(taus)
    m = (nt - 1) // 2
    half = h / 2.0
    node_ix = np.arange(nt)
    prefix_ix = node_ix // 2  # number of full intervals below each node
    odd = node_ix % 2 == 1

    def running(kernel_nodes):
        # kernel_nodes: per-node integrand factor evaluated at the node times
        contrib = h * kernel_nodes[1::2] * Fhat[1::2]
        prefix = np.concatenate(
            [np.zeros((1,) + contrib.shape[1:], dtype=np.complex128), np.cumsum(contrib, axis=0)]
        )
        core = prefix[prefix_ix]
        # trailing half interval [tau_{j-1}, tau_j] for odd targets: left rectangle
        core[odd] += half * kernel_nodes[node_ix[odd] - 1] * Fhat[node_ix[odd] - 1]
        return core

    if equation == "nls":
        phase = np.exp(1j * np.multiply.outer(taus, a))
        core = running(phase)
        out = out - 1j * np.conj(phase) * core
        return out

    cos = np.cos(np.multiply.outer(taus, a))
    ksin = _sine_kernel(a, taus)
    A = running(cos)
    B = running(ksin)
    integral = ksin * A - cos * B
    sign = -1.0 if equation == "nlw" else 1.0
    return out + sign * integral


def _velocity_hat(equation, a, tau, u0hat, u1hat, A_end, B_end):
    """Time derivative of J(u) at one node for the second-order equations."""
    cos = np.cos(tau * a)
    ksin = _sine_kernel(a, np.array([tau]))[0]
    free = -(a**2) * ksin * u0hat + cos * u1hat
    if A_end is None:
        return free
    dintegral = cos * A_end + a**2 * ksin * B_end
    sign = -1.0 if equation == "nlw" else 1.0
    return free + sign * dintegral


def _nonlinearity_values(F: RealEntireSeries, values: np.ndarray) -> np.ndarray:
    return np.asarray(F.evaluate(values.real, values.imag), dtype=np.complex128)


def free_window(data: CauchyData, cfg: SolverConfig, T: float, direction: int = 1) -> WindowPath:
    """The propagated free solution sampled on the window lattice."""
    taus, h = _window_lattice(cfg, T, direction)
    grid = data.u0.grid
    a = _dispersion_rate(data.equation, grid)
    u0hat = _forward_values(data.u0.values, grid)
    u1hat = _forward_values(data.u1.values, grid) if data.u1 is not None else None
    vals = _backward_values(_free_hat(data.equation, a, taus, u0hat, u1hat), grid)
    return WindowPath(data.equation, grid, data.t0, h, taus, vals)


def _window_lattice(cfg: SolverConfig, T: float, direction: int):
    if T <= 0:
        raise ValueError("window length must be positive")
    m = max(1, math.ceil(T / cfg.quadrature_step - 1e-12))
    h = direction * T / m
    taus = np.arange(2 * m + 1) * (h / 2.0)
    return taus, h


def duhamel_map(data: CauchyData, cfg: SolverConfig, path: WindowPath) -> WindowPath:
    """One application of the integral-equation map J to a trial path."""
    if path.values.shape[0] < 1:
        raise ValueError("empty trial path")
    grid = path.grid
    a = _dispersion_rate(data.equation, grid)
    u0hat = _forward_values(data.u0.values, grid)
    u1hat = _forward_values(data.u1.values, grid) if data.u1 is not None else None
    if cfg.nonlinearity.is_zero:
        Fhat = None
    else:
        Fhat = _forward_values(_nonlinearity_values(cfg.nonlinearity, path.values), grid)
    jhat = _duhamel_hat(data.equation, a, path.taus, path.step, u0hat, u1hat, Fhat)
    return WindowPath(path.equation, grid, path.t0, path.step, path.taus, _backward_values(jhat, grid))


@dataclass(frozen=True)
class WindowRecord:
    t_start: float
    T_used: float
    T1: float
    T2: float
    M: float
    contraction_factor: float
    picard_iters: int
    max_norm: float
    end_norm: float


@dataclass
class SolutionPath:
    """Window-boundary states with per-window horizon/contraction metadata."""

    equation: str
    times: list
    states: list  # SampledField for nls, (u, u_t) pairs otherwise
    windows: list
    blew_up: bool = False
    reached_t_end: bool = True

    def state_norms(self, params: ModParams) -> list:
        fields = [s[0] if isinstance(s, tuple) else s for s in self.states]
        return list(map(float, mod_norm_many(fields, params)))


class _WindowRejected(Exception):
    def __init__(self, reason):
        self.reason = reason


def _path_sup_norm(grid, values_batch, params) -> float:
    fields = [SampledField(grid, v, "space") for v in values_batch]
    return float(np.max(mod_norm_many(fields, params)))


def _picard_iterate(data, cfg, hor, T, direction, initial="free"):
    grid = data.u0.grid
    path = free_window(data, cfg, T, direction)
    if initial == "zero":
        path = WindowPath(path.equation, grid, path.t0, path.step, path.taus, np.zeros_like(path.values))
    elif initial != "free":
        raise ValueError("initial must be 'free' or 'zero'")

    factor = 0.0
    prev_inc = None
    tiny = cfg.picard_tol * 1e-3
    for it in range(1, cfg.picard_max_iter + 1):
        nxt = duhamel_map(data, cfg, path)
        inc = _path_sup_norm(grid, nxt.values - path.values, cfg.params)
        if not np.isfinite(inc):
            raise _WindowRejected("non-finite Picard increment")
        if prev_inc is not None and prev_inc > tiny:
            factor = max(factor, inc / prev_inc)
        path = nxt
        if inc < cfg.picard_tol:
            if factor > cfg.contraction_ceiling:
                raise _WindowRejected(f"contraction factor {factor:.3f} above ceiling")
            return path, factor, it
        prev_inc = inc
    raise _WindowRejected("picard_max_iter exceeded")


def solve_window(
    data: CauchyData,
    cfg: SolverConfig,
    T: float | None = None,
    direction: int = 1,
    initial: str = "free",
):
    """Solve one window; returns (path, record).

    The horizon is derived from the current state norms unless ``T`` caps it.
    A rejected window (stalled iteration or contraction above the ceiling)
    halves T and retries, at most ten times.
    """
    norms = _data_norms(data, cfg)
    hor = step_horizon(
        norms[0], cfg.nonlinearity, cfg.c1, norm_u1=norms[1],
        horizon_cap=cfg.horizon_cap, safety=cfg.safety,
    )
    T_try = hor.T if T is None else min(T, hor.T)
    for _ in range(11):
        try:
            path, factor, iters = _picard_iterate(data, cfg, hor, T_try, direction, initial)
        except _WindowRejected:
            T_try /= 2.0
            continue
        max_norm = _path_sup_norm(path.grid, path.values, cfg.params)
        end_norm = _path_sup_norm(path.grid, path.values[-1:], cfg.params)
        record = WindowRecord(
            t_start=data.t0, T_used=T_try, T1=hor.T1, T2=hor.T2, M=hor.M,
            contraction_factor=factor, picard_iters=iters,
            max_norm=max_norm, end_norm=end_norm,
        )
        return path, record
    raise PicardError(f"window at t0={data.t0} failed after 10 halvings")


def _data_norms(data: CauchyData, cfg: SolverConfig):
    if data.u1 is None:
        return float(mod_norm_many([data.u0], cfg.params)[0]), 0.0
    n0, n1 = mod_norm_many([data.u0, data.u1], cfg.params)
    return float(n0), float(n1)


def _window_end_state(data, cfg, path):
    """State handed to the next window: u (and u_t for second-order flows)."""
    grid = path.grid
    u_end = SampledField(grid, path.final_values(), "space")
    if data.equation == "nls":
        return u_end
    a = _dispersion_rate(data.equation, grid)
    u0hat = _forward_values(data.u0.values, grid)
    u1hat = _forward_values(data.u1.values, grid)
    if cfg.nonlinearity.is_zero:
        A_end = B_end = None
    else:
        Fhat = _forward_values(_nonlinearity_values(cfg.nonlinearity, path.values), grid)
        taus, h = path.taus, path.step
        cos = np.cos(np.multiply.outer(taus, a))
        ksin = _sine_kernel(a, taus)
        A_end = h * np.sum(cos[1::2] * Fhat[1::2], axis=0)
        B_end = h * np.sum(ksin[1::2] * Fhat[1::2], axis=0)
    vhat = _velocity_hat(data.equation, a, path.taus[-1], u0hat, u1hat, A_end, B_end)
    ut_end = SampledField(grid, _backward_values(vhat, grid), "space")
    return (u_end, ut_end)


def continue_solution(data: CauchyData, cfg: SolverConfig, t_end: float) -> SolutionPath:
    """March windows from t0 toward t_end, re-deriving each horizon from the
    current state norm; flags blow-up instead of erroring when the norm
    ceiling is hit or the window underflows."""
    if t_end == data.t0:
        raise ValueError("t_end must differ from t0")
    direction = 1 if t_end > data.t0 else -1
    state0 = data.u0 if data.equation == "nls" else (data.u0, data.u1)
    sol = SolutionPath(data.equation, [data.t0], [state0], [])
    initial_norm = sum(_data_norms(data, cfg))
    current = data
    while True:
        remaining = abs(t_end - current.t0)
        if remaining <= 1e-12:
            break
        current_norm = sum(_data_norms(current, cfg))
        if current_norm > cfg.blowup_norm_factor * max(initial_norm, 1e-300):
            sol.blew_up = True
            sol.reached_t_end = False
            break
        path, record = solve_window(current, cfg, T=remaining, direction=direction)
        if record.T_used < cfg.window_floor:
            sol.blew_up = True
            sol.reached_t_end = False
            break
        end_state = _window_end_state(current, cfg, path)
        t_next = current.t0 + direction * record.T_used
        sol.times.append(t_next)
        sol.states.append(end_state)
        sol.windows.append(record)
        if data.equation == "nls":
            current = CauchyData("nls", end_state, t0=t_next)
        else:
            current = CauchyData(data.equation, end_state[0], end_state[1], t0=t_next)
    return sol


def residual(path: WindowPath, data: CauchyData, cfg: SolverConfig, quad_step: float | None = None) -> float:
    """Sup over nodes of the norm of u - J(u), the a-posteriori defect.

    With the default step this is bounded by twice the Picard tolerance on a
    converged window; against a refined step it measures the quadrature
    defect of the path (O(h^2) for the midpoint rule).
    """
    grid = path.grid
    T = path.span
    direction = 1 if path.step > 0 else -1
    h = abs(path.step) if quad_step is None else float(quad_step)
    m = max(1, round(T / h))
    if abs(m * h - T) > 1e-9 * max(T, 1.0):
        raise ValueError("quad_step must divide the window length")
    taus = np.arange(2 * m + 1) * (direction * h / 2.0)
    u_vals = path.at(taus)
    a = _dispersion_rate(data.equation, grid)
    u0hat = _forward_values(data.u0.values, grid)
    u1hat = _forward_values(data.u1.values, grid) if data.u1 is not None else None
    Fhat = (
        None
        if cfg.nonlinearity.is_zero
        else _forward_values(_nonlinearity_values(cfg.nonlinearity, u_vals), grid)
    )
    jhat = _duhamel_hat(data.equation, a, taus, direction * h, u0hat, u1hat, Fhat)
    jvals = _backward_values(jhat, grid)
    return _path_sup_norm(grid, u_vals - jvals, cfg.params)
