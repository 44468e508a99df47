"""Benchmark problems: nonlinear oscillator, a nonnormal linear system,
Fourier-spectral advection, and periodic Burgers flux differencing.

Each constructor returns an :class:`~relaxrk.relaxation.IvpProblem` carrying
the right-hand side, the inner product in which its energy statement holds,
the initial condition, and (where available) the exact solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import StabilityPolynomial, imaginary_interval
from .relaxation import InnerProductSpace, IvpProblem


def oscillator() -> IvpProblem:
    """Nonlinear oscillator u' = (-u2, u1) / |u|^2 with exact solution (cos t, sin t).

    The right-hand side is orthogonal to the state, so the Euclidean energy
    |u|^2 is conserved exactly.  Evaluation at u = 0 is undefined and raises
    ZeroDivisionError.
    """

    def rhs(t, u):
        norm_sq = u[0] * u[0] + u[1] * u[1]
        if norm_sq == 0.0:
            raise ZeroDivisionError("oscillator right-hand side is undefined at u = 0")
        return np.array([-u[1], u[0]]) / norm_sq

    def exact(t):
        return np.array([math.cos(t), math.sin(t)])

    return IvpProblem(
        name="oscillator",
        dim=2,
        rhs=rhs,
        space=InnerProductSpace(2),
        u0=np.array([1.0, 0.0]),
        exact=exact,
        classification="conservative",
    )


#: nonnormal dissipative test matrix of Sun & Shu
SUN_SHU_MATRIX = np.array(
    [
        [-1.0, -2.0, -2.0],
        [0.0, -1.0, -2.0],
        [0.0, 0.0, -1.0],
    ]
)
SUN_SHU_MATRIX.flags.writeable = False


def sun_shu() -> IvpProblem:
    """Linear system u' = Au with the nonnormal Sun-Shu matrix.

    The symmetric part of A is negative semidefinite, so the Euclidean energy
    never grows, yet a single explicit step can still expand the norm.  The
    exact solution uses that A + I is nilpotent.
    """

    def rhs(t, u):
        return SUN_SHU_MATRIX @ u

    N = SUN_SHU_MATRIX + np.eye(3)
    N2 = N @ N
    u0 = np.array([1.0, 1.0, 1.0])

    def exact(t):
        return math.exp(-t) * ((np.eye(3) + t * N + 0.5 * t * t * N2) @ u0)

    return IvpProblem(
        name="sunshu",
        dim=3,
        rhs=rhs,
        space=InnerProductSpace(3),
        u0=u0,
        exact=exact,
        classification="dissipative",
    )


def sun_shu_svd(dt: float, sp: StabilityPolynomial):
    """Largest singular value of K = R(dt*A) for the Sun-Shu matrix.

    Returns ``(sigma_max, v)`` with v the corresponding right singular vector:
    one baseline step of the method from v multiplies the norm by exactly
    sigma_max, the worst case over all initial data.
    """
    Z = dt * SUN_SHU_MATRIX
    K = np.eye(3)
    P = np.eye(3)
    for a in sp.alpha:
        P = P @ Z
        K = K + a * P
    _, S, Vt = np.linalg.svd(K)
    return float(S[0]), Vt[0]


def fourier_diff_matrix(m: int) -> np.ndarray:
    """Fourier collocation differentiation matrix on m equispaced nodes of [0, 2pi).

    D[j, k] = (1/2) (-1)^(j-k) cot((x_j - x_k)/2) off the diagonal and 0 on it.
    Applying D to the mode e^(i xi x) reproduces i*xi*e^(i xi x) for |xi| < m/2.
    """
    if m < 2 or m % 2 != 0:
        raise ValueError(f"node count must be even and >= 2, got {m}")
    x = 2.0 * np.pi * np.arange(m) / m
    jj, kk = np.meshgrid(x, x, indexing="ij")
    sign = np.where((np.arange(m)[:, None] - np.arange(m)[None, :]) % 2 == 0, 1.0, -1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        D = 0.5 * sign / np.tan(0.5 * (jj - kk))
    np.fill_diagonal(D, 0.0)
    D.flags.writeable = False
    return D


def white_noise_profile(m: int, seed: int) -> np.ndarray:
    """Real grid function whose DFT has unit amplitude in every mode.

    Phases of the modes 1 <= xi < m/2 are drawn uniformly from a seeded
    generator and mirrored so the profile is real; the mean mode and the
    Nyquist mode are set to amplitude 1 with phase 0.
    """
    if m < 2 or m % 2 != 0:
        raise ValueError(f"node count must be even and >= 2, got {m}")
    rng = np.random.default_rng(seed)
    half = m // 2
    spec = np.zeros(m, dtype=complex)  # fft ordering: 0..half-1, -half..-1
    spec[0] = 1.0
    spec[half] = 1.0
    theta = rng.uniform(0.0, 2.0 * np.pi, half - 1)
    spec[1:half] = np.exp(1j * theta)
    spec[half + 1 :] = np.conj(spec[1:half][::-1])
    u = m * np.fft.ifft(spec)
    return np.ascontiguousarray(u.real)


def spectral_advection(m: int, ic: str = "sech2", seed: int | None = None) -> IvpProblem:
    """Advection u_t = u_x on [0, 2pi) discretized by Fourier collocation.

    ``ic`` selects the initial profile: ``sech2`` is the smooth pulse
    sech(7.5(x - pi + 1))^2 and ``white_noise`` has unit amplitude in every
    mode with seeded random phases (a seed is required).  The exact solution
    of the semidiscrete system advances mode xi by the phase e^(i xi t); the
    Nyquist mode is stationary under D.
    """
    D = fourier_diff_matrix(m)
    x = 2.0 * np.pi * np.arange(m) / m
    if ic == "sech2":
        u0 = np.cosh(7.5 * (x - np.pi + 1.0)) ** -2
    elif ic == "white_noise":
        if seed is None:
            raise ValueError("white-noise initial data requires a seed")
        u0 = white_noise_profile(m, seed)
    else:
        raise ValueError(f"unknown initial condition {ic!r}; expected 'sech2' or 'white_noise'")

    def rhs(t, u):
        return D @ u

    spec0 = np.fft.fft(u0) / m
    rates = 1j * np.fft.fftfreq(m, d=1.0 / m)
    rates = rates.copy()
    rates[m // 2] = 0.0

    def exact(t):
        return np.real(m * np.fft.ifft(spec0 * np.exp(rates * t)))

    return IvpProblem(
        name="advection",
        dim=m,
        rhs=rhs,
        space=InnerProductSpace(m, np.full(m, 2.0 * np.pi / m)),
        u0=u0,
        exact=exact,
        classification="conservative",
    )


def dt_max(sp: StabilityPolynomial, gamma: float, m: int) -> float:
    """Largest linearly stable step size for m-node spectral advection.

    The spectrum of the differentiation matrix fills the imaginary axis up to
    |xi| = m/2, so dt_max = (2/m) * (imaginary stability interval of R_gamma).
    """
    return (2.0 / m) * imaginary_interval(sp, gamma)


@dataclass(frozen=True)
class DftSpectrum:
    """Discrete Fourier amplitudes ordered by integer wavenumber."""

    xi: np.ndarray  # -m/2 .. m/2-1
    amplitudes: np.ndarray  # hat u_xi = (1/m) sum_j u_j e^(-i xi x_j)


def dft(u) -> DftSpectrum:
    """Normalized DFT of a real grid function on an even number of nodes.

    Parseval in this normalization: sum_xi |hat u_xi|^2 = (1/m) sum_j u_j^2.
    """
    u = np.asarray(u, dtype=float)
    m = len(u)
    if m < 2 or m % 2 != 0:
        raise ValueError(f"node count must be even and >= 2, got {m}")
    amplitudes = np.fft.fftshift(np.fft.fft(u)) / m
    xi = np.fft.fftshift(np.fft.fftfreq(m, d=1.0 / m)).astype(int)
    return DftSpectrum(xi=xi, amplitudes=amplitudes)


#: initial amplitudes at or below this are reported as undefined (nan)
MODE_AMPLITUDE_FLOOR = 1e-14


def mode_amplification(u_start, u_end, m: int):
    """Relative amplitude change (|end| - |start|)/|start| per mode xi >= 0.

    Returns ``(xi, rel_change)`` arrays covering xi = 0 .. m/2 - 1.  Modes
    whose initial amplitude is at or below MODE_AMPLITUDE_FLOOR have no
    meaningful relative change and are reported as nan.
    """
    u_start = np.asarray(u_start, dtype=float)
    u_end = np.asarray(u_end, dtype=float)
    if len(u_start) != m or len(u_end) != m:
        raise ValueError(f"states must have length {m}")
    start = dft(u_start)
    end = dft(u_end)
    keep = start.xi >= 0
    xi = start.xi[keep]
    a0 = np.abs(start.amplitudes[keep])
    a1 = np.abs(end.amplitudes[keep])
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(a0 > MODE_AMPLITUDE_FLOOR, (a1 - a0) / a0, np.nan)
    return xi, rel


@dataclass(frozen=True)
class BurgersConfig:
    """Grid size and flux choice for the periodic Burgers problem."""

    n: int = 50
    flux: str = "conservative"  # or "dissipative"
    epsilon: float = 0.01

    def __post_init__(self):
        if self.flux not in ("conservative", "dissipative"):
            raise ValueError(f"unknown flux {self.flux!r}")
        if self.n < 3:
            raise ValueError(f"need at least 3 grid points, got {self.n}")


def burgers_grid(n: int) -> np.ndarray:
    """n equispaced periodic nodes of [-1, 1)."""
    return -1.0 + (2.0 / n) * np.arange(n)


def burgers(cfg: BurgersConfig = BurgersConfig(), ic=None) -> IvpProblem:
    """Burgers equation u_t + (u^2/2)_x = 0 on [-1, 1) with periodic flux differencing.

    The interface flux (u_i^2 + u_i u_{i+1} + u_{i+1}^2)/6 conserves the
    discrete energy sum dx*u_i^2 exactly; the dissipative variant subtracts
    epsilon*(u_{i+1} - u_i) from it, which strictly removes energy.  ``ic``
    may be a callable x -> u0; the default profile is exp(-30 x^2).  There is
    no closed-form exact solution; see
    :func:`relaxrk.relaxation.make_reference_exact`.
    """
    n = cfg.n
    dx = 2.0 / n
    x = burgers_grid(n)
    dissipative = cfg.flux == "dissipative"
    eps_flux = cfg.epsilon

    def rhs(t, u):
        up = np.roll(u, -1)
        flux = (u * u + u * up + up * up) / 6.0
        if dissipative:
            flux = flux - eps_flux * (up - u)
        return -(flux - np.roll(flux, 1)) / dx

    u0 = np.asarray(ic(x), dtype=float) if callable(ic) else np.exp(-30.0 * x * x)
    return IvpProblem(
        name="burgers-diss" if dissipative else "burgers-cons",
        dim=n,
        rhs=rhs,
        space=InnerProductSpace(n, np.full(n, dx)),
        u0=u0,
        classification="dissipative" if dissipative else "conservative",
    )
