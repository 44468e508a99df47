"""relaxrk: relaxation Runge-Kutta time integration.

Explicit Runge-Kutta methods whose per-step update is rescaled by a scalar
relaxation parameter so the inner-product energy of the solution is conserved
(conservative problems) or dissipated (dissipative problems) exactly, together
with the linear stability and monotonicity analysis of the relaxed methods and
a set of benchmark problems.

Submodules
----------
tableau
    Butcher tableaux, the method registry, rooted-tree order verification,
    and the plain-text tableau file reader.
relaxation
    Inner-product spaces, problems, single steps, the relaxation parameter,
    the fixed-step driver, and convergence/gamma studies.
analysis
    Stability polynomials, region scans, the E-polynomial and the imaginary
    stability interval, algebraic stability, SSP coefficients.
problems
    Oscillator, Sun-Shu system, Fourier-spectral advection, periodic Burgers.
cli
    The ``relaxrk`` command line tool (CSV output plus run manifests).
"""

from .tableau import (
    ButcherTableau,
    REGISTRY_NAMES,
    REGISTRY_ORDERS,
    RootedTree,
    TableauDiagnostics,
    builtin,
    load_tableau_file,
    order_via_trees,
    rooted_trees,
    validate,
)
from .relaxation import (
    InnerProductSpace,
    IntegrationError,
    IvpProblem,
    MODES,
    NonFiniteStateError,
    NonPositiveGammaError,
    StageWorkspace,
    StepOutcome,
    Trajectory,
    convergence_study,
    gamma_direct,
    gamma_efficient,
    gamma_study,
    integrate,
    make_reference_exact,
    relaxation_step,
    rk_step,
)
from .analysis import (
    AlgebraicStabilityReport,
    EPolynomial,
    RegionScan,
    SspReport,
    StabilityPolynomial,
    algebraic_stability_matrix,
    e_polynomial,
    eval_R_gamma,
    gamma_star,
    imaginary_interval,
    region_boundary,
    ssp_coefficient,
    stability_polynomial,
    stability_region_scan,
)
from .problems import (
    BurgersConfig,
    DftSpectrum,
    SUN_SHU_MATRIX,
    burgers,
    dft,
    dt_max,
    fourier_diff_matrix,
    mode_amplification,
    oscillator,
    spectral_advection,
    sun_shu,
    sun_shu_svd,
    white_noise_profile,
)

__version__ = "0.1.0"
