"""Linear stability and monotonicity analysis of explicit Runge-Kutta methods.

For an explicit method the stability function is the polynomial

    R(z) = 1 + sum_k alpha_k z^k,      alpha_k = b . A^(k-1) e,

and relaxing the weights b -> gamma*b rescales every non-constant term:
R_gamma(z) = 1 + gamma*(R(z) - 1).  Everything in this module is built on that
one-parameter family: stability region scans, the imaginary-axis stability
interval, the E-polynomial 1 - |R_gamma(iy)|^2, the algebraic-stability matrix
M = BA + A^T B - b b^T, and the radius of absolute monotonicity (SSP
coefficient) together with the largest safe weight relaxation gamma_star.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .tableau import ButcherTableau

#: componentwise floor for the absolute-monotonicity conditions
MONOTONICITY_COMPONENT_TOL = -1e-10

#: bracket width at which the SSP coefficient bisection stops
SSP_BISECTION_TOL = 1e-8

#: number of points in the imaginary-axis pre-scan
IMAG_SCAN_POINTS = 10_000


@dataclass(frozen=True)
class StabilityPolynomial:
    """Coefficients alpha_k of R(z) - 1 for an explicit method."""

    name: str
    alpha: np.ndarray

    @property
    def stages(self) -> int:
        return len(self.alpha)


def stability_polynomial(tab: ButcherTableau) -> StabilityPolynomial:
    """Compute alpha_k = b . A^(k-1) e for k = 1..s.

    Only explicit tableaux have a polynomial stability function; implicit ones
    raise ValueError.
    """
    if not tab.explicit:
        raise ValueError(
            f"{tab.name}: stability function of an implicit tableau is rational, "
            "not supported here"
        )
    s = tab.stages
    alpha = np.empty(s)
    v = np.ones(s)
    for k in range(s):
        alpha[k] = float(tab.b @ v)
        v = tab.A @ v
    alpha.flags.writeable = False
    return StabilityPolynomial(tab.name, alpha)


def eval_R_gamma(sp: StabilityPolynomial, gamma: float, z):
    """Evaluate R_gamma(z) = 1 + gamma*sum_k alpha_k z^k.

    ``z`` may be a complex scalar or any numpy array of complex values.
    """
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for a in sp.alpha[::-1]:
        acc = (acc + a) * z
    out = 1.0 + gamma * acc
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RegionScan:
    """Gridded |R_gamma| values over a rectangle of the complex plane."""

    gamma: float
    re: np.ndarray
    im: np.ndarray
    modulus: np.ndarray  # shape (len(im), len(re))

    @property
    def stable(self) -> np.ndarray:
        return self.modulus <= 1.0


def stability_region_scan(
    sp: StabilityPolynomial,
    gamma: float,
    re_range=(-5.0, 1.0),
    im_range=(0.0, 5.0),
    resolution: int = 201,
) -> RegionScan:
    """Scan |R_gamma| on a regular grid; a point is stable when |R_gamma| <= 1."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2 per axis")
    re = np.linspace(re_range[0], re_range[1], resolution)
    im = np.linspace(im_range[0], im_range[1], resolution)
    zz = re[None, :] + 1j * im[:, None]
    modulus = np.abs(eval_R_gamma(sp, gamma, zz))
    return RegionScan(gamma=gamma, re=re, im=im, modulus=modulus)


def region_boundary(scan: RegionScan) -> np.ndarray:
    """Boundary points of a region scan as an array of (re, im) rows.

    Sign changes of |R_gamma| - 1 along grid lines are located by linear
    interpolation between the two neighbouring grid points.
    """
    g = scan.modulus - 1.0
    pts = []
    for i in range(g.shape[0]):  # along constant im
        row = g[i]
        for j in np.nonzero(row[:-1] * row[1:] < 0)[0]:
            frac = row[j] / (row[j] - row[j + 1])
            pts.append((scan.re[j] + frac * (scan.re[j + 1] - scan.re[j]), scan.im[i]))
    for j in range(g.shape[1]):  # along constant re
        col = g[:, j]
        for i in np.nonzero(col[:-1] * col[1:] < 0)[0]:
            frac = col[i] / (col[i] - col[i + 1])
            pts.append((scan.re[j], scan.im[i] + frac * (scan.im[i + 1] - scan.im[i])))
    return np.array(pts) if pts else np.empty((0, 2))


@dataclass(frozen=True)
class EPolynomial:
    """Real even polynomial E_gamma(y) = 1 - R_gamma(iy) R_gamma(-iy)."""

    gamma: float
    coeffs: np.ndarray = field(repr=False)  # ascending powers of y, length 2s+1

    def evaluate(self, y):
        return npoly.polyval(np.asarray(y, dtype=float), self.coeffs)


def e_polynomial(sp: StabilityPolynomial, gamma: float) -> EPolynomial:
    """Expand E_gamma(y) = 1 - |R_gamma(iy)|^2 in powers of y.

    E_gamma >= 0 exactly where the imaginary axis point iy is stable.  The
    constant and all odd coefficients vanish identically.
    """
    s = sp.stages
    p = np.zeros(s + 1, dtype=complex)
    p[0] = 1.0
    p[1:] = gamma * sp.alpha * (1j ** np.arange(1, s + 1))
    coeffs = -np.convolve(p, np.conj(p))
    coeffs[0] += 1.0
    imag_leak = float(np.max(np.abs(coeffs.imag)))
    scale = max(1.0, float(np.max(np.abs(coeffs.real))))
    if imag_leak > 1e-12 * scale:
        raise ArithmeticError(f"E-polynomial coefficients not real: leak {imag_leak}")
    real = coeffs.real.copy()
    real.flags.writeable = False
    return EPolynomial(gamma=gamma, coeffs=real)


def imaginary_interval(sp: StabilityPolynomial, gamma: float) -> float:
    """Largest y* such that |R_gamma(iy)| <= 1 for all 0 <= y <= y*.

    Returns 0 when E_gamma is negative immediately to the right of the origin
    (leading nonzero coefficient negative) and math.inf in the degenerate case
    E_gamma == 0 (gamma = 0, where R_gamma is identically 1).  The crossing is
    located by a coarse scan of IMAG_SCAN_POINTS points followed by bisection;
    stable slivers thinner than the scan spacing are not seen.
    """
    ep = e_polynomial(sp, gamma)
    coeffs = ep.coeffs
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    nonzero = np.nonzero(np.abs(coeffs) > 1e-12 * scale)[0]
    if len(nonzero) == 0:
        return math.inf
    if coeffs[nonzero[0]] < 0.0:
        return 0.0

    envelope = np.abs(coeffs)

    def is_negative(y):
        guard = 1e-13 * max(1.0, float(npoly.polyval(y, envelope)))
        return ep.evaluate(y) < -guard

    y_max = 2.0 * float(np.sum(np.abs(sp.alpha))) * sp.stages
    grid = np.linspace(0.0, y_max, IMAG_SCAN_POINTS)
    vals = ep.evaluate(grid)
    guards = 1e-13 * np.maximum(1.0, npoly.polyval(grid, envelope))
    neg = vals < -guards
    if not neg.any():
        return y_max
    first = int(np.argmax(neg))
    lo, hi = grid[first - 1], grid[first]
    for _ in range(200):
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if is_negative(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class AlgebraicStabilityReport:
    """M = BA + A^T B - b b^T with its spectrum and a one-word classification."""

    M: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray
    classification: str  # 'symplectic' | 'algebraically stable' | 'neither'


def algebraic_stability_matrix(tab: ButcherTableau) -> AlgebraicStabilityReport:
    """Form the algebraic-stability matrix and classify the method.

    M == 0 (to 1e-12) means the quadratic error terms in the energy balance
    cancel exactly (symplectic); M positive semidefinite with b >= 0 means they
    only ever dissipate.  Explicit methods land in 'neither'.
    """
    B = np.diag(tab.b)
    M = B @ tab.A + tab.A.T @ B - np.outer(tab.b, tab.b)
    eigenvalues = np.linalg.eigvalsh(M)
    if float(np.max(np.abs(M))) <= 1e-12:
        classification = "symplectic"
    elif float(eigenvalues.min()) >= -1e-12 and bool(np.all(tab.b >= 0.0)):
        classification = "algebraically stable"
    else:
        classification = "neither"
    M = M.copy()
    M.flags.writeable = False
    eigenvalues.flags.writeable = False
    return AlgebraicStabilityReport(M=M, eigenvalues=eigenvalues, classification=classification)


@dataclass(frozen=True)
class SspReport:
    """Radius of absolute monotonicity with the quantities used to certify it."""

    ssp_coeff: float
    gamma_star: float | None
    iterations: int
    margins: dict


def _monotonicity_margins(tab: ButcherTableau, r: float):
    """Smallest entries of the absolute-monotonicity conditions at z = -r.

    The four conditions are A(I+rA)^-1 >= 0, (I+rA)^-1 e >= 0,
    b^T (I+rA)^-1 >= 0 and R(-r) >= 0.  Returns None when I + rA is singular.
    """
    s = tab.stages
    K = np.eye(s) + r * tab.A
    try:
        AK = np.linalg.solve(K.T, tab.A.T).T
        Ke = np.linalg.solve(K, np.ones(s))
        bK = np.linalg.solve(K.T, tab.b)
    except np.linalg.LinAlgError:
        return None
    return {
        "A(I+rA)^-1": float(AK.min()),
        "(I+rA)^-1 e": float(Ke.min()),
        "b(I+rA)^-1": float(bK.min()),
        "R(-r)": 1.0 - r * float(tab.b @ Ke),
    }


def _feasible(margins) -> bool:
    return margins is not None and min(margins.values()) >= MONOTONICITY_COMPONENT_TOL


def _stability_value_at(tab: ButcherTableau, r: float) -> float:
    """R(-r) evaluated through the resolvent, valid for implicit tableaux too."""
    K = np.eye(tab.stages) + r * tab.A
    return 1.0 - r * float(tab.b @ np.linalg.solve(K, np.ones(tab.stages)))


def ssp_coefficient(tab: ButcherTableau) -> SspReport:
    """Radius of absolute monotonicity (SSP coefficient) by bracketing + bisection.

    A singular I + rA during probing counts as infeasible.  The report carries
    gamma_star = -1 / (R(-C) - 1), the largest factor by which the weights can
    be relaxed while keeping absolute monotonicity at some positive radius;
    it is None when C = 0.
    """
    margins0 = _monotonicity_margins(tab, 0.0)
    if not _feasible(margins0):
        return SspReport(0.0, None, 0, margins0)
    iterations = 0
    lo, hi = 0.0, 1.0
    while _feasible(_monotonicity_margins(tab, hi)):
        lo = hi
        hi *= 2.0
        iterations += 1
        if hi > 2.0**40:
            return SspReport(math.inf, None, iterations, _monotonicity_margins(tab, lo))
    while hi - lo > SSP_BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if _feasible(_monotonicity_margins(tab, mid)):
            lo = mid
        else:
            hi = mid
        iterations += 1
    coeff = lo
    gs = None
    if coeff > 0.0:
        gs = _gamma_star_value(tab, coeff)
    return SspReport(coeff, gs, iterations, _monotonicity_margins(tab, coeff))


def _gamma_star_value(tab: ButcherTableau, coeff: float) -> float:
    r_at_c = _stability_value_at(tab, coeff)
    denom = r_at_c - 1.0
    if denom >= 0.0:
        raise ArithmeticError(
            f"{tab.name}: R(-C) = {r_at_c} >= 1 at C = {coeff}, relaxation bound undefined"
        )
    gs = -1.0 / denom
    if gs < 1.0 - 1e-9:
        raise ArithmeticError(f"{tab.name}: computed weight relaxation bound {gs} < 1")
    return gs


def gamma_star(tab: ButcherTableau) -> float:
    """Largest gamma such that (A, gamma*b) stays absolutely monotone somewhere.

    Equals -1 / (R(-C) - 1) >= 1 where C is the SSP coefficient.  Raises
    ValueError when C = 0, where no positive relaxation bound exists.
    """
    report = ssp_coefficient(tab)
    if not report.ssp_coeff > 0.0:
        raise ValueError(
            f"{tab.name}: SSP coefficient is zero, weight relaxation bound undefined"
        )
    if report.gamma_star is None:
        raise ValueError(f"{tab.name}: SSP coefficient unbounded, no finite relaxation bound")
    return report.gamma_star
