"""Collective-ladder quantum evolution against independent oracles."""

import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from gravmix.core import TimeGrid, first_zero_crossing
from gravmix.errors import ParameterError
from gravmix.quantum import (
    LadderState,
    amplitudes_at,
    break_time_scan,
    build_ladder,
    default_horizon,
    evolve_ladder,
    lambda_turnover_probe,
)


def brute_force_amplitudes(h, grid):
    """Dense matrix-exponential stepping, independent of the eig path."""
    u = scipy.linalg.expm(-1j * h.dense(scaled=True) * grid.dt)
    psi = LadderState.all_gravitons(h.n).amps
    out = [psi.copy()]
    record = set(grid.sampled_steps().tolist())
    for k in range(1, grid.n_steps + 1):
        psi = u @ psi
        if k in record:
            out.append(psi.copy())
    return np.asarray(out)


class TestBuildLadder:
    def test_smallest_ladder(self):
        h = build_ladder(1, 0.0)
        np.testing.assert_array_equal(h.offdiag, [1.0])
        np.testing.assert_array_equal(h.diag, [0.0, 0.0])

    def test_n4_offdiagonal(self):
        np.testing.assert_array_equal(build_ladder(4).offdiag, [4.0, 6.0, 6.0, 4.0])

    def test_n2_lambda_diagonal(self):
        np.testing.assert_array_equal(build_ladder(2, 1.0).diag, [-2.0, 0.0, -2.0])

    def test_endpoints_and_peak(self):
        h = build_ladder(100)
        assert h.offdiag[0] == 100.0
        assert h.offdiag[-1] == 100.0
        assert np.argmax(h.offdiag) in (49, 50)

    def test_rejects_empty_ladder(self):
        with pytest.raises(ParameterError):
            build_ladder(0)

    def test_zero_lambda_zero_diagonal(self):
        assert np.all(build_ladder(17, 0.0).diag == 0.0)


class TestEvolveLadder:
    def test_two_level_rabi(self):
        # N = 1 reduces to H = [[0, 1], [1, 0]], so zeta(tau) = cos(2 tau).
        traj = evolve_ladder(build_ladder(1), TimeGrid.to(5.0, 1e-3))
        np.testing.assert_allclose(traj.zeta, np.cos(2.0 * traj.times), atol=1e-8)

    def test_initial_state_all_original(self):
        for n in (1, 7, 64):
            traj = evolve_ladder(build_ladder(n), TimeGrid.to(1.0, 1e-2))
            assert traj.zeta[0] == pytest.approx(1.0, abs=1e-12)

    def test_n512_crossing_matches_law_anchor(self):
        traj = evolve_ladder(build_ladder(512), TimeGrid.to(8.0, 1e-3))
        t = first_zero_crossing(traj)
        assert t == pytest.approx(0.65 * math.log(512.0), rel=0.15)

    def test_norm_energy_and_charge_audits(self):
        traj = evolve_ladder(build_ladder(96, 0.4), TimeGrid.to(12.0, 1e-2))
        assert np.max(np.abs(traj.audits["norm"] - 1.0)) < 1e-9
        scale = max(1.0, np.max(np.abs(traj.audits["energy"])))
        assert np.ptp(traj.audits["energy"]) / scale < 1e-8
        assert np.all(traj.audits["sum_s3_t3"] == 0.0)

    def test_spectrum_symmetric_at_zero_lambda(self):
        d, e = build_ladder(63).scaled()
        energies = scipy.linalg.eigvalsh_tridiagonal(d, e)
        assert np.max(np.abs(np.sort(energies) + np.sort(energies)[::-1])) < 1e-8

    def test_determinism(self):
        a = evolve_ladder(build_ladder(128), TimeGrid.to(4.0, 1e-3))
        b = evolve_ladder(build_ladder(128), TimeGrid.to(4.0, 1e-3))
        np.testing.assert_array_equal(a.zeta, b.zeta)

    def test_crossing_stable_under_grid_refinement(self):
        # Interpolated crossing agrees with brute-force dense sampling at
        # a tenth of the step.
        h = build_ladder(16)
        coarse = first_zero_crossing(evolve_ladder(h, TimeGrid.to(6.0, 1e-3)))
        fine = first_zero_crossing(evolve_ladder(h, TimeGrid.to(6.0, 1e-4)))
        assert abs(coarse - fine) <= 2.0 * 1e-3

    @pytest.mark.parametrize("n", [2, 4, 6])
    @pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
    def test_brute_force_expm_oracle(self, n, lam):
        h = build_ladder(n, lam)
        grid = TimeGrid(0.0, 6.0, 1e-3, sample_every=20)
        amps = amplitudes_at(h, grid.times())
        ref = brute_force_amplitudes(h, grid)
        assert np.max(np.abs(amps - ref)) < 1e-6

    def test_rk4_stepping_fallback_agrees(self):
        h = build_ladder(5, 0.5)
        grid = TimeGrid(0.0, 4.0, 1e-3, sample_every=10)
        eig = evolve_ladder(h, grid, method="eig")
        rk4 = evolve_ladder(h, grid, method="rk4")
        np.testing.assert_allclose(eig.zeta, rk4.zeta, atol=1e-8)

    def test_unknown_method_rejected(self):
        with pytest.raises(ParameterError):
            evolve_ladder(build_ladder(4), TimeGrid.to(1.0, 1e-2), method="magic")

    @given(n=st.integers(2, 40), lam=st.floats(0.0, 1.5))
    @settings(max_examples=10, deadline=None)
    def test_norm_conserved_under_random_configs(self, n, lam):
        traj = evolve_ladder(build_ladder(n, lam), TimeGrid.to(5.0, 1e-2))
        assert np.max(np.abs(traj.audits["norm"] - 1.0)) < 1e-9


class TestLadderState:
    def test_ground_state(self):
        s = LadderState.all_gravitons(4)
        assert s.amps[0] == 1.0
        assert np.all(s.amps[1:] == 0.0)

    def test_rejects_unnormalized(self):
        with pytest.raises(ParameterError):
            LadderState(np.array([1.0, 0.5]))


class TestBreakTimeScan:
    def test_reference_scan_fits(self):
        scan = break_time_scan([16, 64, 256, 1024])
        assert not scan.excluded
        # The law coefficient reproduces the quoted break-time constant; the
        # with-intercept slope sits lower because the intercept is positive.
        assert scan.law.coefficient == pytest.approx(0.65, abs=0.10)
        assert scan.law.r_squared > 0.98
        assert scan.fit.slope == pytest.approx(0.52, abs=0.03)
        assert scan.fit.r_squared > 0.98

    def test_duplicate_n_is_deterministic(self):
        scan = break_time_scan([16, 16])
        (n1, t1), (n2, t2) = scan.crossings
        assert (n1, t1) == (n2, t2)
        assert scan.fit is None and scan.law is None

    def test_lambda_slows_every_crossing(self):
        ns = [16, 32, 64]
        base = dict(break_time_scan(ns, lam=0.0).crossings)
        slowed = dict(break_time_scan(ns, lam=0.5).crossings)
        for n in ns:
            assert slowed[n] > base[n]

    def test_non_crossing_runs_reported(self):
        scan = break_time_scan([16, 32, 64], lam=0.0, horizon=0.5)
        assert set(scan.excluded) == {16, 32, 64}
        assert scan.fit is None

    def test_rejects_tiny_n(self):
        with pytest.raises(ParameterError):
            break_time_scan([1, 16, 64])


class TestLambdaTurnoverProbe:
    def test_gate_behavior_moderate_n(self):
        probe = lambda_turnover_probe(64, [0.0, 0.5, 1.5])
        assert probe[0.0].turned_over
        assert probe[0.5].turned_over
        assert not probe[1.5].turned_over
        assert probe[1.5].min_zeta > 0.9

    def test_horizon_covers_five_crossings(self):
        probe = lambda_turnover_probe(64, [0.0])
        base = probe[0.0].turnover_time
        assert probe[0.0].horizon == pytest.approx(5.0 * base, rel=1e-9)

    def test_slowdown_monotone_below_one(self):
        probe = lambda_turnover_probe(64, [0.5, 0.9])
        assert probe[0.9].turnover_time > probe[0.5].turnover_time

    def test_default_horizon_grows_with_n(self):
        assert default_horizon(1024) > default_horizon(16)
