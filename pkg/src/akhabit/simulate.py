"""Closed-loop optimal trajectories by two independent integrators.

Along the optimum the aggregate G grows exactly at the balanced rate
Gamma, so the excess of consumption over habit is the pure exponential

    c(t) - h(t) = Lambda * exp(Gamma t),      Lambda = alpha * G(0).

Two integrators produce the path:

* the integral form closes the loop through the policy c = h + alpha*G,
  re-evaluating the habit and the discounted consumption window by
  trapezoid at every node (the current consumption enters both windows
  linearly through the endpoint weight, and capital enters the policy
  through the one-step update, so each node is one scalar linear solve);

* the lambda form takes the exponential excess law as given and evolves
  the habit by its differentiated delay law
  dh/dt = eps*(c(t) - c(t-tau) exp(-eta tau)) - eta*h
  alongside capital, with a 4-stage explicit step.

The two routes share nothing beyond the initial quadratures, so their
agreement (and the vanishing residual of the external-habit policy
formula along either path) is the verification target rather than an
assumption.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import dde
from .errors import CoarseGridError, ConstraintError, InconsistencyError
from .hjb import habit_weight
from .model import HistoryGrid, InitialState, ModelParams, validate
from .quadrature import (
    cumulative_trapezoid,
    exp_integral,
    exp_weights,
    steps_for,
    trap_dot,
    window_integral,
)

#: floor multiplier (times Lambda) for relative residual denominators
RESIDUAL_FLOOR = 1e-3


@dataclass(frozen=True)
class Trajectory:
    """One simulated closed-loop path on the uniform grid.

    ``lambda_check`` is the relative gap |c - h - Lambda e^(Gamma t)|
    against the predicted excess; ``external_residual`` the symmetric
    relative residual of the external-habit policy formula at each node.
    ``history`` is the consumption history at the simulation resolution,
    kept so that window quadratures can be re-run on the trajectory.
    """

    t: np.ndarray
    k: np.ndarray
    c: np.ndarray
    h: np.ndarray
    G: np.ndarray
    c_minus_h: np.ndarray
    lambda_check: np.ndarray
    external_residual: np.ndarray
    Lambda: float
    Gamma: float
    method: str
    history: HistoryGrid
    degenerate: bool = False

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def write_csv(self, path) -> None:
        """CSV with one row per node, 17-significant-digit decimals."""
        columns = (
            self.t,
            self.k,
            self.c,
            self.h,
            self.G,
            self.c_minus_h,
            self.lambda_check,
            self.external_residual,
        )
        with open(path, "w", newline="") as fh:
            fh.write("t,k,c,h,G,c_minus_h,lambda_check,external_residual\n")
            for row in zip(*columns):
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


@dataclass(frozen=True)
class MonitorReport:
    """Path-level invariant diagnostics for one trajectory."""

    g_drift: np.ndarray  # per-node |G - G0 e^(Gamma t)| / (G0 e^(Gamma t))
    g_drift_max: float
    lambda_gap_max: float  # max of the trajectory's lambda_check column
    cm_margin_min: float  # min over nodes of c - c_m (should be >= -quadrature noise)
    budget_residual: float  # |disc. consumption + disc. terminal capital - k0| / k0


def lambda_constant(params: ModelParams, init: InitialState) -> float:
    """Level Lambda of the detrended excess consumption, from the initial data.

    Lambda = (r - Gamma) * [kappa0*k0 - (h0/(r+eta) - w * V0)] with
    w the discounted-window weight and V0 the r-discounted history
    integral; equivalently alpha * G at time zero.  Both forms are
    computed and must agree to rounding (the prefactors r - Gamma and
    alpha are the same number through different arithmetic).
    """
    from .hjb import StateSample, g_reduced

    der = validate(params)
    hist = init.history
    r = params.r
    b = r + params.eta
    h0 = params.eps * exp_integral(hist.values, params.eta, hist.dt)
    V0 = exp_integral(hist.values, -r, hist.dt)
    direct = (r - der.Gamma) * (der.kappa0 * init.k0 - (h0 / b - habit_weight(params) * V0))
    via_g = der.alpha * g_reduced(StateSample(init.k0, hist), params)
    scale = abs(direct) + abs(via_g) + der.alpha * der.kappa0 * init.k0 + 1e-300
    if abs(direct - via_g) > 1e-8 * scale:
        raise InconsistencyError(
            f"Lambda forms disagree: direct={direct!r} via G={via_g!r}"
        )
    return direct


def initial_capital_threshold(params: ModelParams, history: HistoryGrid) -> float:
    """Smallest k0 with Lambda > 0: k0* = (h0/(r+eta) - w*V0) / kappa0."""
    der = validate(params)
    b = params.r + params.eta
    h0 = params.eps * exp_integral(history.values, params.eta, history.dt)
    V0 = exp_integral(history.values, -params.r, history.dt)
    return (h0 / b - habit_weight(params) * V0) / der.kappa0


def _rk4_linear_coeffs(r: float, dt: float) -> tuple[float, float, float]:
    """k(t+dt) = a*k(t) + b*c(t) + d*c(t+dt) for dk/dt = r k - c, c linear in t."""

    def step(k, c0, c1):
        cm = 0.5 * (c0 + c1)
        s1 = r * k - c0
        s2 = r * (k + 0.5 * dt * s1) - cm
        s3 = r * (k + 0.5 * dt * s2) - cm
        s4 = r * (k + dt * s3) - c1
        return k + dt * (s1 + 2 * s2 + 2 * s3 + s4) / 6.0

    return step(1.0, 0.0, 0.0), step(0.0, 1.0, 0.0), step(0.0, 0.0, 1.0)


def _prepare(params, init, n):
    """Shared setup: resampled data, Lambda with degeneracy handling."""
    der = validate(params)
    hist = init.history if n is None else init.history.resample(n)
    init = InitialState(init.k0, hist)
    Lam = lambda_constant(params, init)
    scale = der.alpha * der.kappa0 * init.k0 + 1.0
    degenerate = abs(Lam) <= 1e-10 * scale
    if Lam < 0.0 and not degenerate:
        raise ConstraintError(
            f"consumption would start below the habit: Lambda = {Lam:.6g} < 0 "
            f"(k0 below the threshold {initial_capital_threshold(params, hist):.6g})",
            t=0.0,
        )
    if degenerate:
        warnings.warn(
            "Lambda = 0: consumption is pinned to the habit along the whole path "
            "(degenerate boundary initial data)",
            stacklevel=3,
        )
    return der, init, hist, Lam, degenerate


def _finalize(params, der, hist, Lam, degenerate, method, t, k, c, h, G):
    c_minus_h = c - h
    if Lam > 0.0:
        lam_check = np.abs(c_minus_h - Lam * np.exp(der.Gamma * t)) / (
            Lam * (np.exp(der.Gamma * t) + RESIDUAL_FLOOR)
        )
    else:
        lam_check = np.abs(c_minus_h)
    resid = _external_profile(params, hist, t, k, c, h, Lam)
    return Trajectory(
        t=t,
        k=k,
        c=c,
        h=h,
        G=G,
        c_minus_h=c_minus_h,
        lambda_check=lam_check,
        external_residual=resid,
        Lambda=Lam,
        Gamma=der.Gamma,
        method=method,
        history=hist,
        degenerate=degenerate,
    )


def simulate_integral_form(
    params: ModelParams,
    init: InitialState,
    T: float,
    n: int | None = None,
) -> Trajectory:
    """Close the loop through the policy c = h + alpha*G, windows re-quadratured.

    At each node the habit and the discounted window are trapezoid sums
    over the stored concatenated path; the unknown c(t_j) enters both
    through the endpoint weight and enters capital through the one-step
    update, so it solves a scalar linear equation.  Capital advances with
    a 4-stage explicit step treating c as linear over the step.
    """
    der, init, hist, Lam, degenerate = _prepare(params, init, n)
    n = hist.n
    dt = hist.dt
    r = params.r
    b = r + params.eta
    q = habit_weight(params)
    alpha, kappa0 = der.alpha, der.kappa0
    steps = steps_for(T, dt)
    w_eta = exp_weights(params.eta, dt, n)
    w_mr = exp_weights(-r, dt, n)
    a_rk, b_rk, d_rk = _rk4_linear_coeffs(r, dt)

    self_weight = (params.eps * dt / 2.0) * (1.0 - alpha / b) + alpha * kappa0 * d_rk + alpha * q * (dt / 2.0)
    if self_weight >= 1.0:
        raise CoarseGridError(
            f"implicit weight {self_weight:.3g} >= 1 at n={n}; raise n"
        )

    hv = hist.values
    t = np.arange(steps + 1) * dt
    k = np.empty(steps + 1)
    c = np.zeros(steps + 1)
    h = np.empty(steps + 1)
    G = np.empty(steps + 1)

    k[0] = init.k0
    h[0] = params.eps * trap_dot(w_eta, hv, dt)
    W0 = trap_dot(w_mr, hv, dt)
    G[0] = kappa0 * init.k0 - h[0] / b + q * W0
    c[0] = h[0] + alpha * G[0]

    c_tol = 1e-9 * (abs(h[0]) + abs(Lam) + 1.0)
    k_tol = 1e-9 * init.k0
    for j in range(1, steps + 1):
        # c[j] is still 0, so the window sums are the known parts
        h_known = params.eps * window_integral(hv, c, j, params.eta, dt, w_eta)
        W_known = window_integral(hv, c, j, -r, dt, w_mr)
        rhs = (
            h_known * (1.0 - alpha / b)
            + alpha * kappa0 * (a_rk * k[j - 1] + b_rk * c[j - 1])
            + alpha * q * W_known
        )
        cj = rhs / (1.0 - self_weight)
        kj = a_rk * k[j - 1] + b_rk * c[j - 1] + d_rk * cj
        c[j] = cj
        k[j] = kj
        h[j] = h_known + (params.eps * dt / 2.0) * cj
        G[j] = kappa0 * kj - h[j] / b + q * (W_known + (dt / 2.0) * cj)
        if cj < h[j] - c_tol or kj < -k_tol:
            raise ConstraintError(
                f"constraint violated at t={j * dt:.6g}: c={cj:.6g}, h={h[j]:.6g}, k={kj:.6g}",
                t=j * dt,
            )
    return _finalize(params, der, hist, Lam, degenerate, "integral", t, k, c, h, G)


def simulate_lambda_form(
    params: ModelParams,
    init: InitialState,
    T: float,
    n: int | None = None,
) -> Trajectory:
    """Integrate c = h + Lambda e^(Gamma t) with the differentiated habit law.

    The pair (k, h) evolves by a 4-stage explicit step; the delayed
    consumption c(t - tau) is read from the stored path, one linear
    segment per step (the segment switches from the history to the
    computed path exactly at t = tau, which keeps the jump of the
    concatenation at zero on the correct side of each step).
    """
    der, init, hist, Lam, degenerate = _prepare(params, init, n)
    n = hist.n
    dt = hist.dt
    r = params.r
    b = r + params.eta
    q = habit_weight(params)
    eps, eta = params.eps, params.eta
    Gamma = der.Gamma
    decay = math.exp(-eta * params.tau)
    steps = steps_for(T, dt)
    w_eta = exp_weights(eta, dt, n)
    w_mr = exp_weights(-r, dt, n)

    hv = hist.values
    t = np.arange(steps + 1) * dt
    k = np.empty(steps + 1)
    c = np.zeros(steps + 1)
    h = np.empty(steps + 1)

    k[0] = init.k0
    h[0] = eps * trap_dot(w_eta, hv, dt)
    c[0] = h[0] + Lam

    c_tol = 1e-9 * (abs(h[0]) + abs(Lam) + 1.0)
    k_tol = 1e-9 * init.k0
    for j in range(steps):
        if j < n:
            v0, v1 = hv[j], hv[j + 1]
        else:
            v0, v1 = c[j - n], c[j - n + 1]
        t0 = j * dt

        def rate(sigma, kj, hj):
            excess = Lam * math.exp(Gamma * (t0 + sigma * dt))
            c_del = v0 + sigma * (v1 - v0)
            dk = r * kj - (hj + excess)
            dh = (eps - eta) * hj + eps * excess - eps * decay * c_del
            return dk, dh

        dk1, dh1 = rate(0.0, k[j], h[j])
        dk2, dh2 = rate(0.5, k[j] + 0.5 * dt * dk1, h[j] + 0.5 * dt * dh1)
        dk3, dh3 = rate(0.5, k[j] + 0.5 * dt * dk2, h[j] + 0.5 * dt * dh2)
        dk4, dh4 = rate(1.0, k[j] + dt * dk3, h[j] + dt * dh3)
        k[j + 1] = k[j] + dt * (dk1 + 2 * dk2 + 2 * dk3 + dk4) / 6.0
        h[j + 1] = h[j] + dt * (dh1 + 2 * dh2 + 2 * dh3 + dh4) / 6.0
        c[j + 1] = h[j + 1] + Lam * math.exp(Gamma * (j + 1) * dt)
        if c[j + 1] < h[j + 1] - c_tol or k[j + 1] < -k_tol:
            raise ConstraintError(
                f"constraint violated at t={(j + 1) * dt:.6g}", t=(j + 1) * dt
            )

    # the aggregate column is an independent window quadrature of the path,
    # not the ODE state, so its drift is a genuine diagnostic here too
    G = np.empty(steps + 1)
    for j in range(steps + 1):
        hq = eps * window_integral(hv, c, j, eta, dt, w_eta)
        Wq = window_integral(hv, c, j, -r, dt, w_mr)
        G[j] = der.kappa0 * k[j] - hq / b + q * Wq
    return _finalize(params, der, hist, Lam, degenerate, "lambda", t, k, c, h, G)


def _external_profile(params, hist, t, k, c, h, Lam):
    der = validate(params)
    r = params.r
    b = r + params.eta
    dt = float(t[1] - t[0])
    w_mr = exp_weights(-r, dt, hist.n)
    hv = hist.values
    coef = params.eps * math.exp(-params.eta * params.tau) * math.exp(-r * params.tau)
    floor = RESIDUAL_FLOOR * max(Lam, 0.0) + 1e-300
    out = np.empty_like(t)
    for j in range(len(t)):
        W = window_integral(hv, c, j, -r, dt, w_mr)
        lhs = (c[j] - h[j]) / (r - der.Gamma)
        rhs = k[j] - (
            h[j] + params.eps * (1.0 - math.exp(-b * params.tau)) * k[j] - coef * W
        ) / b
        out[j] = abs(lhs - rhs) / (abs(lhs) + abs(rhs) + floor)
    return out


def external_residual_profile(traj: Trajectory, params: ModelParams) -> np.ndarray:
    """Node-wise residual of the external-habit closed-loop policy formula.

    The formula determines (c - h)/(r - Gamma) from k, h, and the
    r-discounted window of past consumption; along the optimal internal
    path it must hold identically, so the symmetric relative residual
    |lhs - rhs| / (|lhs| + |rhs| + floor) is zero up to quadrature noise.
    """
    return _external_profile(
        params, traj.history, traj.t, traj.k, traj.c, traj.h, traj.Lambda
    )


def external_policy_residual(traj: Trajectory, params: ModelParams) -> float:
    """Max node-wise external-policy residual along the trajectory."""
    return float(np.max(external_residual_profile(traj, params)))


def invariant_monitor(
    traj: Trajectory, params: ModelParams, init: InitialState
) -> MonitorReport:
    """Check the exponential G law, the excess law, the lower consumption
    bound, and the discounted budget identity along one trajectory."""
    der = validate(params)
    G_ref = traj.G[0] * np.exp(der.Gamma * traj.t)
    if traj.G[0] > 0.0:
        g_drift = np.abs(traj.G - G_ref) / G_ref
    else:
        g_drift = np.abs(traj.G - G_ref)
    cm = dde.minimal_consumption(params, traj.history, float(traj.t[-1]), n=traj.history.n)
    margin = traj.c - cm.values[: len(traj.c)]
    r = params.r
    disc = cumulative_trapezoid(np.exp(-r * traj.t) * traj.c, traj.dt)
    budget = abs(disc[-1] + math.exp(-r * traj.t[-1]) * traj.k[-1] - init.k0) / init.k0
    return MonitorReport(
        g_drift=g_drift,
        g_drift_max=float(np.max(g_drift)),
        lambda_gap_max=float(np.max(traj.lambda_check)),
        cm_margin_min=float(np.min(margin)),
        budget_residual=budget,
    )
