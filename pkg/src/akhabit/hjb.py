"""Explicit value function, aggregate state functional, and feedback policy.

A point of the controlled system is capital k together with the recent
consumption window; the habit and every functional below are quadratures
of that window.  The scalar aggregate

    G = kappa0 * k - integral over [-tau, 0] of exp(r s) x1(s) ds,
    x1(s) = eps * integral over [-tau, s] of c~(t + u - s) exp(eta u) du,

collapses the infinite-dimensional state to one number on which the value
function is a pure power, v = nu * G^(1-gamma), and the optimal policy is
affine: c = h + alpha * G.  Integrating the double integral by parts
reduces it to a single window quadrature,

    h/(r+eta) - eps*exp(-(r+eta)tau)/(r+eta) *
        integral over [t-tau, t] of exp(r (t-s)) c~(s) ds,

which is the form used throughout the package; G_value evaluates both
forms and cross-checks them.

The HJB residual assembles rho*v - H from the three scalar pieces that
survive the reduction (no gradient object is ever materialized): the
drift pairing h + r*G, the maximized control term, and the habit pairing.
For states assembled from genuine consumption windows the inner component
vanishes at -tau by construction, which is the domain condition the drift
identity needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MismatchError
from .model import DerivedConstants, HistoryGrid, ModelParams, validate
from .quadrature import exp_integral, exp_weights, trap_dot

#: relative disagreement between the two G quadrature forms that flags a
#: too-coarse grid
G_MISMATCH_TOL = 1e-6


@dataclass(frozen=True)
class StateSample:
    """Capital plus the consumption window over [t - tau, t], re-based to [-tau, 0]."""

    k: float
    past_c: HistoryGrid

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 0.0):
            raise DomainError(f"capital must be finite and >= 0, got {self.k}", code="domain:k")


def habit_weight(params: ModelParams) -> float:
    """Weight eps*exp(-(r+eta)tau)/(r+eta) of the discounted window integral in G."""
    b = params.r + params.eta
    return params.eps * math.exp(-b * params.tau) / b


def _window_functionals(state: StateSample, params: ModelParams) -> tuple[float, float]:
    """(habit h, discounted window W) of the state's consumption window.

    W = integral over [t-tau, t] of exp(r (t-s)) c~(s) ds, re-based.
    """
    vals = state.past_c.values
    dt = state.past_c.dt
    h = params.eps * exp_integral(vals, params.eta, dt)
    W = exp_integral(vals, -params.r, dt)
    return h, W


def g_reduced(state: StateSample, params: ModelParams) -> float:
    """The aggregate G via the integrated-by-parts single-window form."""
    der = validate(params)
    h, W = _window_functionals(state, params)
    return der.kappa0 * state.k - h / (params.r + params.eta) + habit_weight(params) * W


def G_value(state: StateSample, params: ModelParams, mismatch_tol: float = G_MISMATCH_TOL) -> float:
    """Aggregate state functional G, computed by both quadrature forms.

    The direct form builds the inner component x1 on the grid and applies
    the outer exp(r s) quadrature; the reduced form is the single-window
    expression.  They are the same integral, so disagreement beyond
    ``mismatch_tol`` (relative to the term scale, not the possibly
    cancelled result) signals a grid too coarse for the state.  Returns
    the reduced form.
    """
    der = validate(params)
    vals = state.past_c.values
    dt = state.past_c.dt
    n = state.past_c.n
    h, W = _window_functionals(state, params)
    second_reduced = h / (params.r + params.eta) - habit_weight(params) * W
    reduced = der.kappa0 * state.k - second_reduced

    w_eta = exp_weights(params.eta, dt, n)
    x1 = np.empty(n + 1)
    x1[0] = 0.0
    for q in range(1, n + 1):
        x1[q] = params.eps * trap_dot(w_eta[: q + 1], vals[n - q :], dt)
    second_direct = exp_integral(x1, params.r, dt)
    direct = der.kappa0 * state.k - second_direct

    scale = abs(der.kappa0 * state.k) + abs(second_reduced) + abs(second_direct) + 1e-300
    if abs(direct - reduced) > mismatch_tol * scale:
        raise MismatchError(
            f"G quadrature forms disagree: direct={direct!r} reduced={reduced!r} "
            f"(relative {abs(direct - reduced) / scale:.3g}); grid too coarse"
        )
    return reduced


def value_function(state: StateSample, params: ModelParams) -> float:
    """v = nu * G^(1-gamma); defined only inside the region G > 0."""
    der = validate(params)
    G = G_value(state, params)
    if G <= 0.0:
        raise DomainError(f"state outside the value region: G = {G:.6g} <= 0", code="domain:G")
    return der.nu * G ** (1.0 - params.gamma)


def feedback(state: StateSample, params: ModelParams) -> float:
    """Optimal consumption c = h + alpha*G; strictly above the habit when G > 0."""
    der = validate(params)
    G = G_value(state, params)
    if G <= 0.0:
        raise DomainError(f"state outside the feedback region: G = {G:.6g} <= 0", code="domain:G")
    h, _ = _window_functionals(state, params)
    return h + der.alpha * G


def _hamiltonian_pieces(
    state: StateSample, params: ModelParams, der: DerivedConstants
) -> tuple[float, float, float, float]:
    """(G, h, v, B*Dv) shared by the residual and the Hamiltonian."""
    G = G_value(state, params)
    if G <= 0.0:
        raise DomainError(f"state outside the value region: G = {G:.6g} <= 0", code="domain:G")
    h, _ = _window_functionals(state, params)
    v = der.nu * G ** (1.0 - params.gamma)
    bstar_dv = -(1.0 - params.gamma) * der.nu * G ** (-params.gamma)
    return G, h, v, bstar_dv


def hjb_residual(state: StateSample, params: ModelParams) -> float:
    """rho*v - H(x, Dv) assembled from the three reduced scalar pieces.

    The drift pairing uses the closed identity h + r*G (integration by
    parts with the window vanishing at its left end) instead of
    differentiating quadrature output.  Zero up to rounding for any state
    with G > 0; this checks the algebra tying nu and alpha together, not
    the quadrature.
    """
    der = validate(params)
    gamma = params.gamma
    G, h, v, bstar_dv = _hamiltonian_pieces(state, params, der)
    drift_pairing = (1.0 - gamma) * der.nu * G ** (-gamma) * (h + params.r * G)
    control_term = (gamma / (1.0 - gamma)) * (-bstar_dv) ** ((gamma - 1.0) / gamma)
    habit_pairing = h * bstar_dv
    hamiltonian = drift_pairing + control_term + habit_pairing
    return params.rho * v - hamiltonian


def current_value_hamiltonian(state: StateSample, params: ModelParams, c: float) -> float:
    """H_CV at the state's own gradient, as a function of the control c.

    u(c - h) + <drift, Dv> + c * B*Dv, with u = -inf below the habit (the
    addiction convention).  The feedback consumption is its unique
    maximizer over c >= h.
    """
    der = validate(params)
    gamma = params.gamma
    G, h, _, bstar_dv = _hamiltonian_pieces(state, params, der)
    excess = c - h
    if excess < 0.0 or (excess == 0.0 and gamma > 1.0):
        return -math.inf
    utility = excess ** (1.0 - gamma) / (1.0 - gamma)
    drift_pairing = (1.0 - gamma) * der.nu * G ** (-gamma) * (h + params.r * G)
    return utility + drift_pairing + c * bstar_dv


def value_bound_coefficient(params: ModelParams) -> float:
    """Coefficient M bounding the value function by M * k^(1-gamma).

    For gamma < 1 it is an upper bound,
        M+ = rho * Gamma(1+gamma) / ((1-gamma) * (gamma*alpha)^(1+gamma)),
    the closed form of the discounted-moment integral in the finiteness
    argument (the rho factor comes from the integration by parts that
    introduces the running utility integral).  For gamma > 1 it is the
    lower bound M- = r^(1-gamma) / (rho*(1-gamma)) < 0, attained when the
    whole capital income can be consumed on top of the minimal plan.
    """
    der = validate(params)
    gamma = params.gamma
    if gamma < 1.0:
        return (
            params.rho
            * math.gamma(1.0 + gamma)
            / ((1.0 - gamma) * (gamma * der.alpha) ** (1.0 + gamma))
        )
    return params.r ** (1.0 - gamma) / (params.rho * (1.0 - gamma))
