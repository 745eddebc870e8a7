"""Trapezoid quadrature helpers shared by the habit integrals.

All windows in this package are uniform grids with step ``dt`` and the
memory length ``tau = n * dt``.  The recurring integral is

    I_beta(t) = integral over [t - tau, t] of f(u) * exp(beta * (u - t)) du

evaluated from samples of f at the window nodes.  Concatenated paths
(history on [-tau, 0) followed by a computed control on [0, T]) jump at
u = 0, so windows that straddle zero are integrated as two trapezoid
sums, one per smooth piece, with both one-sided values at the breakpoint.
Skipping that split costs an O(dt) error on every early window and ruins
the order-2 convergence of everything built on top.
"""

from __future__ import annotations

import math

import numpy as np


def exp_weights(beta: float, dt: float, m: int) -> np.ndarray:
    """Node factors exp(beta * (i*dt - m*dt)) for i = 0..m (no trapezoid halving)."""
    i = np.arange(m + 1)
    return np.exp(beta * (i * dt - m * dt))


def trap_dot(weights: np.ndarray, values: np.ndarray, dt: float) -> float:
    """Trapezoid rule sum(dt * w_i * v_i) with half weight at both ends.

    ``weights`` carries the integrand factor at the nodes (e.g. the
    exponential); ``values`` the sampled function.  A single-node window
    is an empty interval and integrates to zero.
    """
    if len(values) < 2:
        return 0.0
    prod = weights * values
    return dt * (prod.sum() - 0.5 * (prod[0] + prod[-1]))


def exp_integral(values: np.ndarray, beta: float, dt: float) -> float:
    """integral over [-m*dt, 0] of f(u) exp(beta*u) du from samples of f."""
    values = np.asarray(values, dtype=float)
    return trap_dot(exp_weights(beta, dt, len(values) - 1), values, dt)


def window_integral(
    hist: np.ndarray,
    comp: np.ndarray,
    j: int,
    beta: float,
    dt: float,
    weights: np.ndarray | None = None,
) -> float:
    """I_beta at node t_j = j*dt for the concatenated path (hist, comp).

    ``hist`` holds n+1 samples on [-tau, 0] whose last entry is the left
    limit at 0; ``comp`` holds the computed samples on [0, T] starting with
    the right value at 0.  For j >= n the window lies inside [0, T] and is
    a single trapezoid sum; for j < n it is split at u = 0.  ``weights``
    may pass a precomputed ``exp_weights(beta, dt, n)``.
    """
    n = len(hist) - 1
    if weights is None:
        weights = exp_weights(beta, dt, n)
    if j >= n:
        return trap_dot(weights, comp[j - n : j + 1], dt)
    split = n - j
    left = trap_dot(weights[: split + 1], hist[j:], dt)
    right = trap_dot(weights[split:], comp[: j + 1], dt)
    return left + right


def cumulative_trapezoid(values: np.ndarray, dt: float) -> np.ndarray:
    """Running trapezoid integral of sampled values, starting at 0."""
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    out[0] = 0.0
    np.cumsum(dt * 0.5 * (values[1:] + values[:-1]), out=out[1:])
    return out


def steps_for(T: float, dt: float) -> int:
    """Number of grid steps covering [0, T] (rounded up, at least one)."""
    return max(int(math.ceil(T / dt - 1e-9)), 1)
