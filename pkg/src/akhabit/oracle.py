"""Brute-force finite-horizon check that the closed-loop path is optimal.

The continuous problem is truncated to [0, T] on a uniform grid whose
step divides tau.  A control vector (consumption at the nodes) is scored
by the discrete functional

    J(c) = trapezoid of exp(-rho t) (c - h)^(1-gamma)/(1-gamma)
           + exp(-rho T) * v(terminal state),

where the habit h is the trapezoid window of the concatenated path, the
capital path is the exact exponential formula with a cumulative-trapezoid
discounted-consumption integral, and the salvage term is the closed-form
value at the terminal state (along the optimum the discounted value is a
martingale, so salvage makes the truncation exact up to quadrature).

Everything here is deliberately independent of the closed-loop machinery:
utilities are summed directly from the control vector, gradients are
finite differences of J (computed incrementally, which is exact for this
objective since a one-coordinate bump touches one habit window, the
terminal state, and nothing else), and the maximizer is a spectral
projected gradient ascent.  Agreement of max J with the closed-form value
is then evidence, not circularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergence, OptimalityViolation
from .hjb import habit_weight
from .model import InitialState, ModelParams, validate

#: relative slack used when checking constraints of candidate controls
FEAS_TOL = 1e-9


def _u(excess, gamma):
    """CES utility of the excess, elementwise; excess must be >= 0."""
    with np.errstate(divide="ignore"):
        return excess ** (1.0 - gamma) / (1.0 - gamma)


class DiscreteProblem:
    """Grid, kernels, and cached weights for the discrete objective.

    ``m`` steps on [0, T]; the step T/m must divide tau (the habit window
    must be a whole number of grid cells) and T must exceed tau.
    """

    def __init__(self, params: ModelParams, init: InitialState, T: float, m: int):
        der = validate(params)
        dt = T / m
        n_tau = params.tau / dt
        if abs(n_tau - round(n_tau)) > 1e-9:
            raise DomainError(
                f"grid step T/m = {dt:.6g} must divide tau = {params.tau:.6g}",
                code="domain:grid",
            )
        n_tau = int(round(n_tau))
        if m <= n_tau:
            raise DomainError("horizon must exceed one memory length", code="domain:grid")

        self.params = params
        self.derived = der
        self.init = init.resample(n_tau)
        self.T = T
        self.m = m
        self.dt = dt
        self.n_tau = n_tau
        self.t = np.arange(m + 1) * dt

        r = params.r
        # habit kernel eps*dt*exp(eta*(i dt - tau)), trapezoid-halved copy
        i = np.arange(n_tau + 1)
        self.kbase = params.eps * dt * np.exp(params.eta * (i * dt - params.tau))
        self.kerw = self.kbase.copy()
        self.kerw[0] *= 0.5
        self.kerw[-1] *= 0.5
        # split-window corrections at the history/control boundary
        hv = self.init.history.values
        self.hist_end = float(hv[-1])
        vH = np.zeros(m + 1)
        vC = np.zeros(m + 1)
        vC[0] = 0.5 * self.kbase[n_tau]
        if n_tau >= 2:
            mid = np.arange(1, n_tau)
            vH[mid] = 0.5 * self.kbase[n_tau - mid]
            vC[mid] = vH[mid]
        vH[n_tau] = 0.5 * self.kbase[0]
        self._vH = vH
        self._vC = vC

        self.disc_rho = np.exp(-params.rho * self.t)
        self.disc_r = np.exp(-r * self.t)
        self.grow_r = np.exp(r * self.t)
        wt = np.ones(m + 1)
        wt[0] = wt[-1] = 0.5
        self.wt = wt
        # terminal discounted window: integral over [T-tau, T] of e^{r(T-s)} c(s) ds
        self.wker = dt * np.exp(r * (params.tau - i * dt))
        self.wker[0] *= 0.5
        self.wker[-1] *= 0.5
        self.q = habit_weight(params)
        self.b = r + params.eta

    # -- forward pass -------------------------------------------------------

    def habit(self, controls: np.ndarray) -> np.ndarray:
        """Habit at every node for the concatenated (history, controls) path.

        One sliding correlation against the window kernel, with the
        history's left limit and the control's start sharing the t = 0
        slot; the correction vectors restore the half-weights both
        one-sided values carry in windows that straddle the jump.
        """
        hv = self.init.history.values
        cc = np.concatenate([hv[:-1], [self.hist_end + controls[0]], controls[1:]])
        h = np.correlate(cc, self.kerw, mode="valid")
        return h - self._vH * self.hist_end - self._vC * controls[0]

    def capital(self, controls: np.ndarray) -> np.ndarray:
        """k(t) = e^{rt} (k0 - integral of e^{-ru} c(u) du), cumulative trapezoid."""
        f = self.disc_r * controls
        integral = np.empty(self.m + 1)
        integral[0] = 0.0
        np.cumsum(self.dt * 0.5 * (f[1:] + f[:-1]), out=integral[1:])
        return self.grow_r * (self.init.k0 - integral)

    def terminal_aggregate(self, controls: np.ndarray, k_T: float, h_T: float) -> float:
        W_T = float(self.wker @ controls[self.m - self.n_tau :])
        return self.derived.kappa0 * k_T - h_T / self.b + self.q * W_T

    def salvage(self, G_T: float) -> float:
        if G_T <= 0.0:
            return -math.inf
        return self.disc_rho[-1] * self.derived.nu * G_T ** (1.0 - self.params.gamma)


@dataclass(frozen=True)
class ObjectiveParts:
    """Breakdown of one objective evaluation."""

    J: float
    running: float
    salvage: float
    feasible: bool
    excess: np.ndarray
    habit: np.ndarray
    capital: np.ndarray


def objective_breakdown(problem: DiscreteProblem, controls: np.ndarray) -> ObjectiveParts:
    """Forward-simulate habit and capital from the controls and score them."""
    controls = np.asarray(controls, dtype=float)
    if controls.shape != (problem.m + 1,):
        raise ValueError(f"controls must have shape ({problem.m + 1},)")
    gamma = problem.params.gamma
    h = problem.habit(controls)
    k = problem.capital(controls)
    excess = controls - h
    scale = max(1.0, float(np.max(np.abs(controls))))
    tol = FEAS_TOL * scale
    feasible = bool(
        np.all(controls >= -tol) and np.all(excess >= -tol) and np.all(k >= -tol * problem.init.k0)
    )
    if not feasible:
        return ObjectiveParts(-math.inf, -math.inf, 0.0, False, excess, h, k)
    exc = np.maximum(excess, 0.0)
    if gamma > 1.0 and np.any(exc == 0.0):
        return ObjectiveParts(-math.inf, -math.inf, 0.0, False, excess, h, k)
    u = problem.disc_rho * _u(exc, gamma)
    running = problem.dt * float(u @ problem.wt)
    G_T = problem.terminal_aggregate(controls, float(k[-1]), float(h[-1]))
    salv = problem.salvage(G_T)
    return ObjectiveParts(running + salv, running, salv, math.isfinite(salv), excess, h, k)


def evaluate_objective(problem: DiscreteProblem, controls: np.ndarray) -> float:
    """Discrete objective value; -inf sentinel on any constraint violation."""
    return objective_breakdown(problem, controls).J


# -- finite-difference gradient ---------------------------------------------


def fd_gradient(problem: DiscreteProblem, controls: np.ndarray, fdh: float | None = None) -> np.ndarray:
    """Two-point forward difference (J(c + fdh e_i) - J(c)) / fdh for every i.

    Computed incrementally: bumping c_i changes the excess on the habit
    window [t_i, t_i + tau], the terminal capital, and (for the last
    window) the terminal aggregate, so each difference is an O(tau/dt)
    re-sum rather than a full re-evaluation.  Matches the naive version
    to rounding.
    """
    controls = np.asarray(controls, dtype=float)
    m, L = problem.m, problem.n_tau + 1
    gamma = problem.params.gamma
    if fdh is None:
        fdh = 1e-6 * max(1.0, float(np.mean(np.abs(controls))))

    base = objective_breakdown(problem, controls)
    if not math.isfinite(base.J):
        raise ValueError("fd_gradient needs a feasible base control")
    exc = np.maximum(base.excess, 0.0)

    # window matrices, padded past T with weight zero (pad value is benign)
    pad_exc = np.concatenate([exc, np.ones(L - 1)])
    wts = problem.dt * problem.wt * problem.disc_rho
    pad_wts = np.concatenate([wts, np.zeros(L - 1)])
    E = np.lib.stride_tricks.sliding_window_view(pad_exc, L)
    Wm = np.lib.stride_tricks.sliding_window_view(pad_wts, L)

    # excess perturbation pattern: delta_exc[i+l] = fdh*(1{l=0} - dh[i+l]/dc_i)
    sens = problem.kerw[::-1].copy()  # generic dh_{i+l}/dc_i for i >= 1
    p_generic = -sens
    p_generic[0] += 1.0
    # coordinate 0 sits at the history/control breakpoint: halved influence,
    # none on h_0
    sens0 = 0.5 * problem.kbase[::-1]
    sens0[0] = 0.0
    p0 = -sens0
    p0[0] += 1.0
    P = np.broadcast_to(p_generic, (m + 1, L)).copy()
    P[0] = p0

    dU = (_u(E + fdh * P, gamma) - _u(E, gamma)) * Wm
    d_running = dU.sum(axis=1)

    # salvage sensitivity through k_T, h_T, and the terminal window
    dk_T = -problem.dt * problem.wt * np.exp(problem.params.r * (problem.T - problem.t))
    tail = np.arange(m - problem.n_tau, m + 1)
    dh_T = np.zeros(m + 1)
    dh_T[tail] = problem.kerw[tail - (m - problem.n_tau)]  # dh_m/dc_i = kerw[n_tau-(m-i)]
    dW_T = np.zeros(m + 1)
    dW_T[tail] = problem.wker
    dG = problem.derived.kappa0 * dk_T - dh_T / problem.b + problem.q * dW_T

    k_T = float(base.capital[-1])
    h_T = float(base.habit[-1])
    G_T = problem.terminal_aggregate(controls, k_T, h_T)
    d_salv = problem.disc_rho[-1] * problem.derived.nu * (
        (G_T + fdh * dG) ** (1.0 - gamma) - G_T ** (1.0 - gamma)
    )
    return (d_running + d_salv) / fdh


def fd_gradient_naive(problem: DiscreteProblem, controls: np.ndarray, fdh: float | None = None) -> np.ndarray:
    """Literal one-coordinate-at-a-time forward differences (test reference)."""
    controls = np.asarray(controls, dtype=float)
    if fdh is None:
        fdh = 1e-6 * max(1.0, float(np.mean(np.abs(controls))))
    J0 = evaluate_objective(problem, controls)
    out = np.empty(problem.m + 1)
    for i in range(problem.m + 1):
        bumped = controls.copy()
        bumped[i] += fdh
        out[i] = (evaluate_objective(problem, bumped) - J0) / fdh
    return out


# -- feasibility restoration -------------------------------------------------


def project_feasible(problem: DiscreteProblem, controls: np.ndarray) -> np.ndarray:
    """Raise controls, left to right, until c >= max(h, 0) at every node.

    The habit at node i depends on the already-fixed past and on c_i
    itself through the endpoint weight, so the floor solves the scalar
    inequality exactly.  Raising a node only raises later habits, which
    later sweeps steps see; one pass restores feasibility of the habit
    constraint.  (Capital positivity is left to the objective's penalty
    or sentinel.)
    """
    c = np.maximum(np.asarray(controls, dtype=float).copy(), 0.0)
    hv = problem.init.history.values
    n_tau = problem.n_tau
    kerw = problem.kerw
    self_w = kerw[-1]  # eps*dt/2, the weight of c_i in its own habit window
    # shared t = 0 slot as in habit(); c_i lives at cc[n_tau + i]
    cc = np.concatenate([hv[:-1], [problem.hist_end], np.zeros(problem.m)])
    c0_floor = float(kerw @ hv)  # h_0 is the pure history window, no self term
    c[0] = max(c[0], c0_floor)
    cc[n_tau] += c[0]
    for i in range(1, problem.m + 1):
        known = float(kerw @ cc[i : i + n_tau + 1])
        known -= problem._vH[i] * problem.hist_end + problem._vC[i] * c[0]
        # cc slot of c_i still holds 0, so: c_i >= known + self_w * c_i
        floor = known / (1.0 - self_w)
        if c[i] < floor:
            c[i] = floor
        cc[n_tau + i] = c[i]
    return c


# -- perturbation sweep -------------------------------------------------------


@dataclass(frozen=True)
class PerturbationReport:
    """Outcome of the random feasible-perturbation sweep around a base control."""

    trials: int
    J_base: float
    max_gain: float
    improving: int
    tolerance: float


def perturbation_test(
    problem: DiscreteProblem,
    base_controls: np.ndarray,
    trials: int = 100,
    seed: int = 42,
    tol: float = 1e-6,
) -> PerturbationReport:
    """Throw smooth bumps and node spikes at the base control; none may win.

    Amplitudes are scaled to a fraction of the smallest excess so the
    habit constraint keeps a margin, and every candidate is re-projected
    onto feasibility before scoring.  Raises OptimalityViolation if any
    candidate beats the base by more than tol*|J_base|.
    """
    rng = np.random.default_rng(seed)
    base_controls = np.asarray(base_controls, dtype=float)
    base = objective_breakdown(problem, base_controls)
    if not math.isfinite(base.J):
        raise ValueError("perturbation_test needs a feasible base control")
    margin = float(np.min(np.maximum(base.excess, 0.0)))
    scale = margin if margin > 0 else 0.1 * float(np.mean(base_controls) + 1.0)
    t = problem.t
    T = problem.T
    tau = problem.params.tau

    max_gain = -math.inf
    improving = 0
    for _ in range(trials):
        amp = float(rng.uniform(0.05, 0.4)) * scale * float(rng.choice((-1.0, 1.0)))
        if rng.uniform() < 0.7:
            width = float(rng.uniform(0.5, 2.0)) * tau
            start = float(rng.uniform(0.0, max(T - width, 1e-9)))
            bump = np.zeros_like(t)
            inside = (t >= start) & (t <= start + width)
            bump[inside] = np.sin(math.pi * (t[inside] - start) / width) ** 2
        else:
            bump = np.zeros_like(t)
            bump[rng.integers(0, problem.m + 1)] = 1.0
        candidate = base_controls + amp * bump
        J = evaluate_objective(problem, project_feasible(problem, candidate))
        for _half in range(20):
            if math.isfinite(J):
                break
            amp *= 0.5
            candidate = base_controls + amp * bump
            J = evaluate_objective(problem, project_feasible(problem, candidate))
        gain = J - base.J
        if gain > max_gain:
            max_gain = gain
        if gain > tol * abs(base.J):
            improving += 1

    report = PerturbationReport(
        trials=trials,
        J_base=base.J,
        max_gain=max_gain,
        improving=improving,
        tolerance=tol * abs(base.J),
    )
    if improving:
        raise OptimalityViolation(
            f"{improving}/{trials} perturbations improved J by up to {max_gain:.3e} "
            f"(tolerance {report.tolerance:.3e})"
        )
    return report


# -- projected ascent ---------------------------------------------------------


@dataclass(frozen=True)
class AscentResult:
    controls: np.ndarray
    J: float
    iterations: int
    converged: bool


def projected_ascent(
    problem: DiscreteProblem,
    start_controls: np.ndarray,
    iters: int = 500,
    target_value: float | None = None,
) -> AscentResult:
    """Spectral projected gradient ascent on the discrete objective.

    Finite-difference gradients, preconditioned by the quadrature weight
    dt * w * exp(-rho t) (so a unit step means a unit move of the
    underlying consumption function), spectral step lengths, and a
    nonmonotone backtracking line search.  Stops early when the best
    value stalls; if ``target_value`` is given and unmet at a stall,
    raises NonConvergence.
    """
    c = project_feasible(problem, np.asarray(start_controls, dtype=float))
    J = evaluate_objective(problem, c)
    if not math.isfinite(J):
        raise ValueError("projected_ascent needs a feasible start")
    precond = problem.dt * problem.wt * problem.disc_rho
    g = fd_gradient(problem, c)
    step = 1.0 / max(float(np.max(np.abs(g / precond))), 1e-12)
    best_c, best_J = c.copy(), J
    recent = [J]
    stall = 0
    it = 0
    for it in range(1, iters + 1):
        direction = g / precond
        ref = max(recent)
        accepted = False
        for _ in range(40):
            cand = project_feasible(problem, c + step * direction)
            J_cand = evaluate_objective(problem, cand)
            if J_cand >= ref - 1e-12 * abs(ref):
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        g_new = fd_gradient(problem, cand)
        s = cand - c
        y = g_new - g
        sy = -float(s @ y)  # positive curvature for a concave objective
        ss = float(s @ s)
        step = ss / sy if sy > 1e-300 else step * 2.0
        c, J, g = cand, J_cand, g_new
        recent.append(J)
        if len(recent) > 10:
            recent.pop(0)
        if J > best_J:
            gain = J - best_J
            best_c, best_J = c.copy(), J
            stall = 0 if gain > 1e-12 * abs(best_J) else stall + 1
        else:
            stall += 1
        if stall >= 30:
            break

    converged = target_value is None or best_J >= target_value
    if target_value is not None and not converged:
        raise NonConvergence(
            f"ascent stalled at J={best_J:.9g} after {it} iterations, "
            f"short of the target {target_value:.9g}"
        )
    return AscentResult(controls=best_c, J=best_J, iterations=it, converged=converged)
