"""Relaxation time stepping for explicit Runge-Kutta methods.

After the stages of a step are computed, a single scalar gamma is chosen so
that the update u + gamma*dt*d (d the usual weighted sum of stage derivatives)
reproduces the exact energy balance of the problem in the given inner product:
energy is conserved to roundoff for conservative right-hand sides and never
grows for dissipative ones.  Two interpretations of the relaxed update are
supported:

* ``rrk``: the new state approximates the solution at t + gamma*dt and the
  full classical order is kept;
* ``idt``: the new state is assigned to t + dt, which costs one order;
* ``baseline``: gamma is pinned to 1, giving the unmodified method.

gamma solves a scalar quadratic whose coefficients are inner products of stage
derivatives.  Both the direct O(s^2)-inner-product form and the equivalent
(s+1)-inner-product form are provided; the stepper uses the cheap one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .tableau import ButcherTableau

EPS = float(np.finfo(float).eps)

#: accepted stepping modes
MODES = ("baseline", "idt", "rrk")

#: gamma outside this range is recorded as a warning in trajectory metadata
GAMMA_WARN_RANGE = (0.5, 1.5)

#: hard cap on the number of accepted steps in one integrate() call
MAX_STEPS = 10**8


class IntegrationError(RuntimeError):
    """Numerical abort during time stepping.

    ``step_index`` is filled in by :func:`integrate` when the failure happens
    inside a driver loop.
    """

    def __init__(self, message: str):
        super().__init__(message)
        self.step_index = None


class NonFiniteStateError(IntegrationError):
    """A right-hand side evaluation or state update produced inf or nan."""

    def __init__(self, message: str, stage: int | None = None):
        super().__init__(message)
        self.stage = stage


class NonPositiveGammaError(IntegrationError):
    """The relaxation parameter came out <= 0; the step size is too large."""


@dataclass(frozen=True)
class InnerProductSpace:
    """Weighted Euclidean inner product <u, v> = sum_i w_i u_i v_i."""

    dim: int
    weights: np.ndarray = None

    def __post_init__(self):
        if self.weights is None:
            w = np.ones(self.dim)
        else:
            w = np.array(self.weights, dtype=float)
        if w.shape != (self.dim,):
            raise ValueError(f"weights must have shape ({self.dim},), got {w.shape}")
        if not np.all(w > 0.0):
            raise ValueError("inner product weights must be strictly positive")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def inner(self, u, v) -> float:
        return float(np.dot(self.weights * np.asarray(u), np.asarray(v)))

    def norm_sq(self, u) -> float:
        return self.inner(u, u)

    def norm(self, u) -> float:
        return math.sqrt(self.norm_sq(u))


@dataclass(frozen=True)
class IvpProblem:
    """An initial value problem u' = rhs(t, u) with its energy inner product.

    ``classification`` records what <u, rhs(t, u)> does: 'conservative' means
    identically zero, 'dissipative' means never positive, anything else is
    'generic'.  ``exact`` is optional; convergence studies require it.
    """

    name: str
    dim: int
    rhs: Callable
    space: InnerProductSpace
    u0: np.ndarray
    t0: float = 0.0
    exact: Callable | None = None
    classification: str = "generic"

    def __post_init__(self):
        if self.classification not in ("conservative", "dissipative", "generic"):
            raise ValueError(f"unknown classification {self.classification!r}")
        if self.space.dim != self.dim:
            raise ValueError("inner product space dimension does not match problem")
        u0 = np.array(self.u0, dtype=float)
        if u0.shape != (self.dim,):
            raise ValueError(f"u0 must have shape ({self.dim},), got {u0.shape}")
        u0.flags.writeable = False
        object.__setattr__(self, "u0", u0)


@dataclass(frozen=True)
class StageWorkspace:
    """Stage data of one explicit RK step, reused by the gamma computation."""

    stages: np.ndarray  # (s, dim) stage states y_i
    stage_derivs: np.ndarray  # (s, dim) rhs at the stages
    direction: np.ndarray  # sum_j b_j f_j
    u_start: np.ndarray
    t_start: float
    dt: float


@dataclass(frozen=True)
class StepOutcome:
    """One accepted step: new state, new time, gamma and the energy pair."""

    u_next: np.ndarray
    t_next: float
    gamma: float
    energy_before: float
    energy_after: float
    fallback_used: bool


@dataclass
class Trajectory:
    """Time series produced by :func:`integrate`.

    ``energy`` holds squared norms.  The first record is the initial condition
    with gamma set to 1 by convention.
    """

    t: np.ndarray
    states: np.ndarray
    gamma: np.ndarray
    energy: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)


def rk_step(tab: ButcherTableau, prob: IvpProblem, t: float, u, dt: float):
    """One step of the unmodified explicit method.

    Returns ``(u_next, workspace)``; the workspace carries stages and stage
    derivatives so gamma can be computed without further rhs evaluations.
    """
    if not tab.explicit:
        raise ValueError(f"{tab.name}: only explicit tableaux are supported")
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    u = np.asarray(u, dtype=float)
    s = tab.stages
    stages = np.empty((s, len(u)))
    derivs = np.empty_like(stages)
    for i in range(s):
        y = u + dt * (tab.A[i, :i] @ derivs[:i])
        f = np.asarray(prob.rhs(t + tab.c[i] * dt, y), dtype=float)
        if f.shape != u.shape:
            raise ValueError(f"rhs returned shape {f.shape}, expected {u.shape}")
        if not np.all(np.isfinite(f)):
            raise NonFiniteStateError(
                f"non-finite right-hand side at stage {i} (t = {t})", stage=i
            )
        stages[i] = y
        derivs[i] = f
    direction = tab.b @ derivs
    u_next = u + dt * direction
    for arr in (stages, derivs, direction):
        arr.flags.writeable = False
    ws = StageWorkspace(
        stages=stages,
        stage_derivs=derivs,
        direction=direction,
        u_start=u,
        t_start=t,
        dt=dt,
    )
    return u_next, ws


def _denominator_floor(space: InnerProductSpace, u_n, stages: int) -> float:
    return EPS * max(1.0, space.norm_sq(u_n)) * stages**2


def gamma_direct(tab: ButcherTableau, ws: StageWorkspace, space: InnerProductSpace):
    """Relaxation parameter from the full Gram matrix of stage derivatives.

    gamma = 2 sum_ij b_i a_ij <f_i, f_j> / sum_ij b_i b_j <f_i, f_j>.  Returns
    ``(gamma, fallback_used)``; when the denominator |sum b_j f_j|^2 is below
    the roundoff floor the step direction is negligible and gamma falls back
    to 1.
    """
    F = ws.stage_derivs
    gram = (F * space.weights) @ F.T
    den = float(tab.b @ gram @ tab.b)
    if den <= _denominator_floor(space, ws.u_start, tab.stages):
        return 1.0, True
    num = 2.0 * float(np.einsum("i,ij,ij->", tab.b, tab.A, gram))
    return num / den, False


def gamma_efficient(
    tab: ButcherTableau, ws: StageWorkspace, u_n, dt: float, space: InnerProductSpace
):
    """Relaxation parameter from s+1 inner products.

    Uses <f_i, y_i - u_n> = dt * sum_j a_ij <f_i, f_j>, so the numerator needs
    one inner product per stage and the denominator one more.  Algebraically
    identical to :func:`gamma_direct`.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    u_n = np.asarray(u_n, dtype=float)
    den = space.inner(ws.direction, ws.direction)
    if den <= _denominator_floor(space, u_n, tab.stages):
        return 1.0, True
    acc = 0.0
    for i in range(tab.stages):
        acc += tab.b[i] * space.inner(ws.stage_derivs[i], ws.stages[i] - u_n)
    return (2.0 / dt) * acc / den, False


def relaxation_step(
    tab: ButcherTableau, prob: IvpProblem, t: float, u, dt: float, mode: str = "rrk"
) -> StepOutcome:
    """One step in the requested mode.

    ``baseline`` takes the plain RK update and gamma = 1.  ``idt`` and ``rrk``
    scale the update direction by gamma; they differ only in the time the new
    state is assigned to (t + dt versus t + gamma*dt).  gamma <= 0 raises
    NonPositiveGammaError: the step size is too large for the relaxation
    approach to make sense (this also catches first-order methods, whose gamma
    is identically 0).
    """
    mode = mode.lower()
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    u = np.asarray(u, dtype=float)
    u_rk, ws = rk_step(tab, prob, t, u, dt)
    space = prob.space
    energy_before = space.norm_sq(u)
    if mode == "baseline":
        gamma, fallback = 1.0, False
        u_next = u_rk
        t_next = t + dt
    else:
        gamma, fallback = gamma_efficient(tab, ws, u, dt, space)
        if gamma <= 0.0:
            raise NonPositiveGammaError(
                f"relaxation parameter {gamma:.6g} <= 0 at t = {t:.6g}; "
                "reduce the step size"
            )
        u_next = u + (gamma * dt) * ws.direction
        t_next = t + gamma * dt if mode == "rrk" else t + dt
    if not np.all(np.isfinite(u_next)):
        raise NonFiniteStateError(f"non-finite state after step at t = {t:.6g}")
    return StepOutcome(
        u_next=u_next,
        t_next=t_next,
        gamma=gamma,
        energy_before=energy_before,
        energy_after=space.norm_sq(u_next),
        fallback_used=fallback,
    )


def integrate(
    tab: ButcherTableau,
    prob: IvpProblem,
    t0: float,
    u0,
    dt: float,
    t_end: float,
    mode: str = "rrk",
) -> Trajectory:
    """Fixed-step driver from t0 to t_end.

    The nominal step size of the last step is shrunk so the nominal times land
    exactly on t_end; in rrk mode the achieved final time then differs from
    t_end by O(dt^p) because the last step still gets scaled by its gamma (no
    re-stepping is attempted).  The achieved time is recorded in
    ``metadata['t_final']`` and in the last time entry.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_end > t0:
        raise ValueError(f"t_end must exceed t0, got t0 = {t0}, t_end = {t_end}")
    u = np.array(u0, dtype=float)
    t = float(t0)
    space = prob.space
    ts = [t]
    states = [u.copy()]
    gammas = [1.0]
    energies = [space.norm_sq(u)]
    warnings = []
    fallback_steps = 0
    time_floor = 1e-12 * (t_end - t0)
    n = 0
    while t < t_end - time_floor:
        if n >= MAX_STEPS:
            raise IntegrationError(f"step cap {MAX_STEPS} reached at t = {t}")
        dt_n = dt
        final = t + dt_n >= t_end - time_floor
        if t + dt_n > t_end:
            dt_n = t_end - t
        try:
            out = relaxation_step(tab, prob, t, u, dt_n, mode)
        except IntegrationError as exc:
            exc.step_index = n
            raise
        u = out.u_next
        t = out.t_next
        ts.append(t)
        states.append(np.asarray(u))
        gammas.append(out.gamma)
        energies.append(out.energy_after)
        if not (GAMMA_WARN_RANGE[0] <= out.gamma <= GAMMA_WARN_RANGE[1]):
            warnings.append(f"step {n}: gamma = {out.gamma:.6g} outside {GAMMA_WARN_RANGE}")
        if out.fallback_used:
            fallback_steps += 1
        n += 1
        if final:
            break
    metadata = {
        "method": tab.name,
        "mode": mode,
        "dt": float(dt),
        "steps": n,
        "t_requested": float(t_end),
        "t_final": float(t),
        "fallback_steps": fallback_steps,
        "warnings": warnings,
    }
    return Trajectory(
        t=np.array(ts),
        states=np.array(states),
        gamma=np.array(gammas),
        energy=np.array(energies),
        metadata=metadata,
    )


def least_squares_slope(x, y) -> float:
    """Slope of log(y) against log(x) by least squares."""
    x = np.asarray(x, dtype=float)
    y = np.maximum(np.asarray(y, dtype=float), 1e-300)
    if len(x) < 2:
        return math.nan
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def convergence_study(
    tab: ButcherTableau,
    prob: IvpProblem,
    t0: float,
    u0,
    dt_list,
    t_end: float,
    mode: str = "rrk",
):
    """Errors against the exact solution over a list of step sizes.

    Each run is integrated to t_end and its error is measured at the achieved
    final time (which in rrk mode is not exactly t_end).  Returns
    ``(points, slope)`` where points are (dt, error, achieved_t, final_gamma)
    tuples and slope is the log-log least squares fit.
    """
    if prob.exact is None:
        raise ValueError(
            f"problem {prob.name!r} has no exact solution; attach one "
            "(see make_reference_exact) before running a convergence study"
        )
    points = []
    for dt in dt_list:
        traj = integrate(tab, prob, t0, u0, dt, t_end, mode)
        t_ach = float(traj.t[-1])
        err = prob.space.norm(traj.states[-1] - np.asarray(prob.exact(t_ach), dtype=float))
        points.append((float(dt), float(err), t_ach, float(traj.gamma[-1])))
    slope = least_squares_slope([p[0] for p in points], [p[1] for p in points])
    return points, slope


def gamma_study(tab: ButcherTableau, prob: IvpProblem, t0: float, u0, dt_list):
    """|gamma - 1| of the first step as a function of dt.

    Returns ``(points, slope)`` with points of the form (dt, |gamma - 1|).
    For a method of order p the deviation shrinks like dt^(p-1), one order
    faster on problems with enough symmetry.  Step sizes whose deviation
    underflows to exactly zero are left out of the slope fit.
    """
    u0 = np.asarray(u0, dtype=float)
    points = []
    for dt in dt_list:
        _, ws = rk_step(tab, prob, t0, u0, dt)
        g, _ = gamma_efficient(tab, ws, u0, dt, prob.space)
        points.append((float(dt), abs(g - 1.0)))
    fit = [(dt, dev) for dt, dev in points if dev > 0.0]
    slope = least_squares_slope([p[0] for p in fit], [p[1] for p in fit])
    return points, slope


def make_reference_exact(prob: IvpProblem, tab: ButcherTableau | None = None, dt: float = 1e-4):
    """Build an 'exact' callable by fine-step baseline integration.

    For problems without a closed-form solution (Burgers) this provides the
    reference needed by convergence studies.  Every call integrates fresh from
    the problem's own initial condition with a step size shrunk to divide the
    requested time exactly, so the reference is deterministic.
    """
    if tab is None:
        from .tableau import builtin

        tab = builtin("BSRK(8,5)")

    def exact(t: float) -> np.ndarray:
        span = float(t) - prob.t0
        if span <= 0.0:
            return prob.u0.copy()
        n = max(1, math.ceil(span / dt))
        traj = integrate(tab, prob, prob.t0, prob.u0, span / n, t, mode="baseline")
        return traj.states[-1]

    return exact
