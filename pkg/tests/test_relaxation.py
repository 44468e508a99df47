import dataclasses

import numpy as np
import pytest

from relaxrk.problems import BurgersConfig, burgers, oscillator, spectral_advection, sun_shu
from relaxrk.relaxation import (
    InnerProductSpace,
    IntegrationError,
    IvpProblem,
    NonFiniteStateError,
    NonPositiveGammaError,
    convergence_study,
    gamma_direct,
    gamma_efficient,
    gamma_study,
    integrate,
    least_squares_slope,
    make_reference_exact,
    relaxation_step,
    rk_step,
)
from relaxrk.tableau import builtin

# 30-digit high precision value of gamma for one RK(4,4) step on the
# oscillator from (1, 0) with dt = 0.5: 0.999349583024760923463309398847
GAMMA_RK44_OSC_HALF = 0.9993495830247609


def constant_problem(dim=3, value=0.0):
    u0 = np.arange(1.0, dim + 1.0)
    return IvpProblem(
        name="flat",
        dim=dim,
        rhs=lambda t, u: np.full(dim, value),
        space=InnerProductSpace(dim),
        u0=u0,
    )


def test_inner_product_space_basics():
    sp = InnerProductSpace(3, weights=[2.0, 1.0, 1.0])
    u = np.array([1.0, 2.0, 3.0])
    v = np.array([1.0, 0.0, -1.0])
    assert sp.inner(u, v) == pytest.approx(2.0 - 3.0)
    assert sp.norm_sq(u) == pytest.approx(2.0 + 4.0 + 9.0)
    assert sp.norm(u) == pytest.approx(np.sqrt(15.0))
    with pytest.raises(ValueError):
        InnerProductSpace(2, weights=[1.0, 0.0])


def test_ivp_problem_validation():
    sp = InnerProductSpace(2)
    with pytest.raises(ValueError):
        IvpProblem("p", 2, lambda t, u: u, sp, np.zeros(3))
    with pytest.raises(ValueError):
        IvpProblem("p", 2, lambda t, u: u, sp, np.zeros(2), classification="magic")


def test_rk_step_scalar_exponential():
    # u' = u for one unit step of the classical method: truncated exp series
    prob = IvpProblem("exp", 1, lambda t, u: u, InnerProductSpace(1), np.ones(1))
    u1, ws = rk_step(builtin("RK(4,4)"), prob, 0.0, prob.u0, 1.0)
    assert u1[0] == pytest.approx(65.0 / 24.0, abs=1e-15)
    assert ws.stages.shape == (4, 1)
    assert not ws.stages.flags.writeable
    assert not ws.stage_derivs.flags.writeable


def test_rk_step_stage_relation_is_exact():
    tab = builtin("BSRK(8,5)")
    prob = oscillator()
    dt = 0.37
    _, ws = rk_step(tab, prob, 0.0, prob.u0, dt)
    for i in range(tab.stages):
        expected = prob.u0 + dt * (tab.A[i, :i] @ ws.stage_derivs[:i])
        np.testing.assert_array_equal(ws.stages[i], expected)


def test_rk_step_rejects_bad_rhs_output():
    sp = InnerProductSpace(2)
    bad_shape = IvpProblem("b", 2, lambda t, u: np.zeros(3), sp, np.ones(2))
    with pytest.raises(ValueError):
        rk_step(builtin("RK(4,4)"), bad_shape, 0.0, bad_shape.u0, 0.1)
    bad_value = IvpProblem("n", 2, lambda t, u: np.array([np.nan, 0.0]), sp, np.ones(2))
    with pytest.raises(NonFiniteStateError):
        rk_step(builtin("RK(4,4)"), bad_value, 0.0, bad_value.u0, 0.1)


def test_gamma_matches_high_precision_value():
    tab = builtin("RK(4,4)")
    prob = oscillator()
    _, ws = rk_step(tab, prob, 0.0, prob.u0, 0.5)
    g_direct, fb1 = gamma_direct(tab, ws, prob.space)
    g_eff, fb2 = gamma_efficient(tab, ws, prob.u0, 0.5, prob.space)
    assert not fb1 and not fb2
    assert g_direct == pytest.approx(GAMMA_RK44_OSC_HALF, abs=5e-16)
    assert g_eff == pytest.approx(GAMMA_RK44_OSC_HALF, abs=5e-16)


def test_gamma_formulas_agree_on_random_states():
    rng = np.random.default_rng(11)
    tabs = [builtin(n) for n in ("SSPRK(2,2)", "SSPRK(3,3)", "RK(4,4)", "BSRK(8,5)")]
    prob = oscillator()
    for tab in tabs:
        for _ in range(10):
            u = rng.normal(size=2)
            u /= np.linalg.norm(u)
            dt = float(rng.uniform(0.05, 0.6))
            _, ws = rk_step(tab, prob, 0.0, u, dt)
            g1, _ = gamma_direct(tab, ws, prob.space)
            g2, _ = gamma_efficient(tab, ws, u, dt, prob.space)
            assert abs(g1 - g2) <= 1e-12 * abs(g1)


def test_gamma_fallback_on_zero_rhs():
    tab = builtin("RK(4,4)")
    prob = constant_problem(value=0.0)
    _, ws = rk_step(tab, prob, 0.0, prob.u0, 0.3)
    g, fallback = gamma_direct(tab, ws, prob.space)
    assert fallback
    assert g == 1.0


def test_relaxation_step_mode_contracts():
    tab = builtin("SSPRK(3,3)")
    prob = oscillator()
    dt = 0.4
    base = relaxation_step(tab, prob, 0.0, prob.u0, dt, mode="baseline")
    idt = relaxation_step(tab, prob, 0.0, prob.u0, dt, mode="idt")
    rrk = relaxation_step(tab, prob, 0.0, prob.u0, dt, mode="rrk")
    assert base.gamma == 1.0
    assert base.t_next == dt
    assert idt.t_next == dt
    assert rrk.t_next == pytest.approx(rrk.gamma * dt, abs=0.0)
    # same gamma and same state for idt and rrk, different time label
    assert idt.gamma == rrk.gamma
    np.testing.assert_array_equal(idt.u_next, rrk.u_next)
    assert rrk.energy_before == pytest.approx(1.0)
    with pytest.raises(ValueError):
        relaxation_step(tab, prob, 0.0, prob.u0, dt, mode="projected")


def test_relaxed_step_conserves_oscillator_energy():
    prob = oscillator()
    for name in ("SSPRK(2,2)", "RK(4,4)"):
        out = relaxation_step(builtin(name), prob, 0.0, prob.u0, 0.9, mode="rrk")
        assert abs(out.energy_after - 1.0) <= 1e-14


def test_one_step_error_rk44_oscillator():
    # global one-step accuracy pinned by an independent integrator run:
    # the dt = 0.1 error is 2.919e-07, scaling like dt^5 below that
    prob = oscillator()
    out = relaxation_step(builtin("RK(4,4)"), prob, 0.0, prob.u0, 0.1, mode="baseline")
    err = np.linalg.norm(out.u_next - prob.exact(0.1))
    assert 2.8e-7 < err < 3.0e-7
    out2 = relaxation_step(builtin("RK(4,4)"), prob, 0.0, prob.u0, 0.05, mode="baseline")
    err2 = np.linalg.norm(out2.u_next - prob.exact(0.05))
    assert err / err2 == pytest.approx(32.0, rel=0.03)


def test_nonpositive_gamma_reported_with_step_index():
    prob = burgers(BurgersConfig(n=50, flux="conservative"))
    with pytest.raises(NonPositiveGammaError, match="reduce the step size") as info:
        integrate(builtin("RK(4,4)"), prob, 0.0, prob.u0, 50.0, 200.0, "rrk")
    assert info.value.step_index is not None


def test_integrate_time_grid_and_metadata():
    tab = builtin("SSPRK(3,3)")
    prob = oscillator()
    traj = integrate(tab, prob, 0.0, prob.u0, 0.3, 1.0, "baseline")
    # nominal grid lands exactly on t_end; last step is shrunk
    np.testing.assert_allclose(traj.t, [0.0, 0.3, 0.6, 0.9, 1.0], atol=1e-15)
    assert traj.metadata["steps"] == 4
    assert traj.metadata["t_final"] == 1.0
    assert traj.metadata["t_requested"] == 1.0
    assert traj.metadata["mode"] == "baseline"
    assert traj.metadata["method"] == "SSPRK(3,3)"
    assert len(traj) == 5
    np.testing.assert_array_equal(traj.states[0], prob.u0)
    assert traj.gamma[0] == 1.0
    assert np.all(np.diff(traj.t) > 0.0)


def test_integrate_rrk_final_time_differs_by_gamma():
    tab = builtin("RK(4,4)")
    prob = oscillator()
    one = integrate(tab, prob, 0.0, prob.u0, 0.5, 0.5, "rrk")
    assert one.metadata["t_final"] == pytest.approx(GAMMA_RK44_OSC_HALF * 0.5, abs=1e-15)
    assert one.metadata["t_final"] != 0.5
    traj = integrate(tab, prob, 0.0, prob.u0, 0.5, 2.0, "rrk")
    assert abs(traj.metadata["t_final"] - 2.0) < 0.001
    # energy column is the squared norm of the recorded states
    norms = [prob.space.norm_sq(s) for s in traj.states]
    np.testing.assert_allclose(traj.energy, norms, rtol=0.0, atol=0.0)


def test_integrate_argument_validation():
    tab = builtin("RK(4,4)")
    prob = oscillator()
    with pytest.raises(ValueError):
        integrate(tab, prob, 0.0, prob.u0, -0.1, 1.0, "rrk")
    with pytest.raises(ValueError):
        integrate(tab, prob, 1.0, prob.u0, 0.1, 1.0, "rrk")


def test_monotone_energy_on_dissipative_problem():
    prob = sun_shu()
    traj = integrate(builtin("RK(4,4)"), prob, 0.0, prob.u0, 0.5, 10.0, "rrk")
    assert np.all(np.diff(traj.energy) <= 0.0)


def test_convergence_study_slopes():
    tab = builtin("RK(4,4)")
    prob = oscillator()
    dts = [0.5, 0.25, 0.125]
    pts, slope = convergence_study(tab, prob, 0.0, prob.u0, dts, 5.0, "rrk")
    assert len(pts) == 3
    assert 3.6 < slope < 4.4
    for dt, err, achieved, final_gamma in pts:
        assert err > 0.0
        assert abs(achieved - 5.0) < 0.01
        assert 0.9 < final_gamma < 1.1


def test_convergence_study_needs_exact():
    prob = burgers()
    with pytest.raises(ValueError, match="exact"):
        convergence_study(builtin("RK(4,4)"), prob, 0.0, prob.u0, [0.01], 0.03, "rrk")


def test_gamma_study_first_step_deviation():
    prob = oscillator()
    pts, slope = gamma_study(builtin("RK(4,4)"), prob, 0.0, prob.u0, [0.5, 0.25, 0.125])
    assert pts[0][1] == pytest.approx(1.0 - GAMMA_RK44_OSC_HALF, rel=1e-12)
    assert 3.5 < slope < 5.0


def test_gamma_study_drops_exact_zero_deviations():
    prob = constant_problem(value=0.0)
    pts, slope = gamma_study(builtin("RK(4,4)"), prob, 0.0, prob.u0, [0.4, 0.2])
    assert [dev for _, dev in pts] == [0.0, 0.0]
    assert np.isnan(slope)


def test_least_squares_slope_recovers_power():
    dts = np.array([0.4, 0.2, 0.1, 0.05])
    assert least_squares_slope(dts, 3.0 * dts**2.5) == pytest.approx(2.5, abs=1e-12)


def test_make_reference_exact_tracks_true_solution():
    prob = oscillator()
    ref = make_reference_exact(prob, dt=1e-3)
    for t in (0.0, 0.3, 1.7):
        np.testing.assert_allclose(ref(t), prob.exact(t), atol=1e-10)


def test_affine_weights_change_gamma():
    # relaxation is tied to the chosen inner product, so reweighting moves gamma
    prob = oscillator()
    weighted = dataclasses.replace(
        prob, space=InnerProductSpace(2, weights=[3.0, 1.0]), classification="generic"
    )
    tab = builtin("RK(4,4)")
    _, ws = rk_step(tab, prob, 0.0, prob.u0, 0.5)
    g_plain, _ = gamma_direct(tab, ws, prob.space)
    g_weighted, _ = gamma_direct(tab, ws, weighted.space)
    assert g_plain != g_weighted
