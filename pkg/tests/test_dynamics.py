import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from aqabound import algorithms as zoo
from aqabound.algorithms import BooleanFunctionSpec as F
from aqabound.bounds import compute_bound, delta_v
from aqabound.dynamics import (
    Schedule,
    final_fidelity,
    integrate,
    min_adiabatic_time,
    scaling_experiment,
    verify_chain,
)
from aqabound.errors import IntegrationQualityError, PropertyViolation
from aqabound.graph_tools import random_graph
from aqabound.quantum_core import BasisDescriptor, DiagonalOperator, StateVector


def test_schedule_shapes():
    lin, quad = Schedule.linear(4.0), Schedule.power(4.0, 2.0)
    assert lin.lam(2.0) == 0.5 and quad.lam(2.0) == 0.25
    assert lin.rate(1.0) == 0.25 and quad.rate(2.0) == pytest.approx(0.25)
    assert lin.shape_average == 0.5
    assert quad.shape_average == pytest.approx(1 / 3)
    assert quad.with_time(9.0).T == 9.0


def test_table_schedule_average_by_quadrature():
    s = np.linspace(0, 1, 41)
    table = Schedule.from_table(1.0, s, s**3)
    assert table.shape_average == pytest.approx(0.25, abs=1e-6)
    assert table.lam(0.0) == 0.0 and table.lam(1.0) == 1.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(shape="linear", T=0.0),
        dict(shape="power", T=1.0, exponent=-1.0),
        dict(shape="spline", T=1.0),
        dict(shape="table", T=1.0, table=((0.0, 0.5, 1.0), (0.0, 0.7, 0.6))),
        dict(shape="table", T=1.0, table=((0.0, 1.0), (0.1, 1.0))),
    ],
)
def test_schedule_validation(kwargs):
    with pytest.raises(ValueError):
        Schedule(**kwargs)


def exact_final_state(p, sched, pieces=4000):
    """Oracle: product of exact exponentials on a midpoint grid (second order, fine grid)."""
    h0, h1 = p.h0.to_dense(), p.h1.to_dense()
    dt = sched.T / pieces
    psi = p.phi0.amps.copy()
    for i in range(pieces):
        lam = float(sched.lam((i + 0.5) * dt))
        psi = scipy.linalg.expm(-1j * dt * ((1 - lam) * h0 + lam * h1)) @ psi
    return psi


def test_evolution_matches_exponential_oracle():
    p = zoo.grover(2, [1])
    sched = Schedule.linear(3.0)
    traj = integrate(p, sched, samples=2)
    oracle = exact_final_state(p, sched)
    assert abs(np.vdot(oracle, traj.psi[-1].amps)) ** 2 == pytest.approx(1.0, abs=1e-6)


def test_time_independent_limit():
    # h1 == h0 means a stationary Hamiltonian: phi0 only picks up a phase
    b = BasisDescriptor.full(2)
    h = DiagonalOperator(b, [0.0, 1.0, 2.0, 3.0])
    phi0 = StateVector.basis_state(b, 0)
    p = zoo.Problem("static", b, h, phi0, h0=h)
    traj = integrate(p, Schedule.linear(5.0), samples=11)
    assert np.allclose(traj.fidelity, 1.0, atol=1e-12)
    assert np.allclose(traj.theta, 0.0, atol=1e-7)
    verify_chain(traj)


def test_large_T_grover_is_adiabatic():
    traj = integrate(zoo.grover(2, [2]), Schedule.linear(50.0))
    assert traj.final_fidelity >= 0.99


PROBLEMS = [
    zoo.dj_wei(3, F.balanced()),
    zoo.bernstein_vazirani(2, "10"),
    zoo.grover(3, [4]),
    zoo.kclique(random_graph(5, 0.7, 2), 3, deformed=True),
]


@pytest.mark.parametrize("p", PROBLEMS, ids=lambda p: p.name)
@pytest.mark.parametrize("sched", [Schedule.linear(5.0), Schedule.power(5.0, 2.0)], ids=["linear", "power2"])
def test_trajectory_invariants(p, sched):
    traj = integrate(p, sched)
    assert traj.norm_drift < 1e-9
    assert np.all(np.diff(traj.lam) > 0) and traj.lam[0] == 0 and traj.lam[-1] == 1
    assert np.all(np.diff(traj.R) >= 0)
    assert np.all((traj.fidelity >= -1e-12) & (traj.fidelity <= 1 + 1e-12))
    assert np.all((traj.theta >= 0) & (traj.theta <= math.pi / 2))
    rep = verify_chain(traj)
    assert rep.min_left >= -1e-8 and rep.min_right >= -1e-8
    # at lam = 0 every quantity in the chain is zero
    assert traj.fidelity[0] == pytest.approx(1.0) and traj.overlap[0] == pytest.approx(1.0)
    assert traj.theta[0] == 0.0 and traj.R[0] == 0.0
    # R identity for drivers with phi0 as an eigenstate
    assert traj.R[-1] == pytest.approx(sched.T * sched.shape_average * delta_v(p), rel=1e-6)


@pytest.mark.parametrize("p", PROBLEMS, ids=lambda p: p.name)
def test_step_halving_convergence(p):
    sched = Schedule.linear(5.0)
    coarse = integrate(p, sched, samples=2)
    fine = integrate(p, sched, steps=2 * coarse.steps, samples=2)
    assert abs(coarse.final_fidelity - fine.final_fidelity) < 1e-7


def test_R_is_linear_in_lambda_for_linear_schedule():
    p = zoo.dj_wei(3, F.constant())
    traj = integrate(p, Schedule.linear(5.0))
    # R(t) = integral of lam * deltaV dt = T deltaV lam^2 / 2; in lambda the integrand lam*deltaV is linear
    expected = 5.0 * delta_v(p) * traj.lam**2 / 2
    assert np.allclose(traj.R, expected, atol=1e-8)


def test_corrupted_fidelity_is_caught():
    traj = integrate(zoo.grover(2, [0]), Schedule.linear(2.0), samples=21)
    fid = traj.fidelity.copy()
    fid[10] += 0.2 if fid[10] >= traj.overlap[10] else -0.2
    import dataclasses

    bad = dataclasses.replace(traj, fidelity=fid)
    with pytest.raises(PropertyViolation, match="sample 10"):
        verify_chain(bad)


def test_csv_export():
    traj = integrate(zoo.grover(2, [0]), Schedule.linear(1.0), samples=5)
    lines = traj.to_csv().splitlines()
    assert lines[0] == "t,lambda,fidelity,overlapC,bures,R,sinR_clamped,chain_slack_left,chain_slack_right"
    assert len(lines) == 6
    assert float(lines[-1].split(",")[1]) == 1.0


def test_integration_argument_checks():
    p = zoo.grover(2, [0])
    with pytest.raises(ValueError):
        integrate(p, Schedule.linear(1.0), steps=10)
    with pytest.raises(ValueError):
        integrate(p, Schedule.linear(1.0), samples=1)
    with pytest.raises(ValueError):
        integrate(zoo.ising_counterexample(3), Schedule.linear(1.0))


def test_coarse_steps_raise_quality_error():
    with pytest.raises(IntegrationQualityError):
        integrate(zoo.grover(3, [0]), Schedule.linear(400.0), steps=100)


def test_final_fidelity_matches_trajectory():
    p = zoo.grover(2, [3])
    traj = integrate(p, Schedule.linear(4.0), steps=4000, samples=2)
    assert final_fidelity(p, Schedule.linear(4.0), steps=4000) == pytest.approx(traj.final_fidelity, abs=1e-14)


def test_min_time_grover_respects_bound():
    p = zoo.grover(2, [3])
    res = min_adiabatic_time(p, Schedule.linear(1.0), 0.2)
    assert res.converged
    assert res.T_min >= compute_bound(p, 0.2, 0.5).tLower
    assert (res.T_min - res.lower) <= 0.02 * res.T_min
    # regression value of the first crossing found by bracketing and bisection
    assert res.T_min == pytest.approx(8.0, rel=0.02)
    assert 1 - final_fidelity(p, Schedule.linear(res.T_min)) <= 0.2


def test_min_time_trivial_and_capped():
    p = zoo.grover(2, [3])
    assert min_adiabatic_time(p, Schedule.linear(1.0), 0.999).T_min == 0.0
    res = min_adiabatic_time(p, Schedule.linear(1.0), 0.001, T_cap=2.0)
    assert not res.converged and res.T_min == res.lower
    with pytest.raises(ValueError):
        min_adiabatic_time(p, Schedule.linear(1.0), 1.0)


def test_dj_wei_min_time_is_size_independent():
    t4 = min_adiabatic_time(zoo.dj_wei(4, F.balanced()), Schedule.linear(1.0), 0.1).T_min
    t6 = min_adiabatic_time(zoo.dj_wei(6, F.balanced()), Schedule.linear(1.0), 0.1).T_min
    assert abs(t4 - t6) <= 0.2 * min(t4, t6)


def test_scaling_experiment_grover():
    res = scaling_experiment(lambda n: zoo.grover(n, [0]), [2, 3, 4, 5], 0.1, Schedule.linear(1.0))
    # slope of log T_min vs log N between the necessary 1/2 and the linear-schedule 1
    assert 0.4 <= res.slope <= 1.1
    assert all(r.T_min >= r.tLower for r in res.rows)


def test_scaling_experiment_dj_wei_is_flat():
    res = scaling_experiment(lambda n: zoo.dj_wei(n, F.constant()), [2, 3, 4, 5], 0.1, Schedule.linear(1.0))
    assert abs(res.slope) <= 0.15


@settings(max_examples=10, deadline=None)
@given(st.floats(0.3, 6.0), st.sampled_from(["linear", "power"]), st.integers(0, 3))
def test_runtime_bound_is_necessary(T, shape, which):
    p = [zoo.grover(2, [1]), zoo.dj_wei(2, F.constant()), zoo.dj_das(2, F.balanced()), zoo.bernstein_vazirani(1, "1")][which]
    sched = Schedule.linear(T) if shape == "linear" else Schedule.power(T, 2.0)
    traj = integrate(p, sched, samples=11)
    verify_chain(traj)
    for eps in (0.1, 0.25):
        if 1 - traj.final_fidelity <= eps:
            assert T >= compute_bound(p, eps, sched.shape_average).tLower - 1e-9
