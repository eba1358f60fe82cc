"""Acceptance suite: the headline physics checks, one test per criterion.

Each criterion prints one `[ACCEPTANCE] criterion k: PASS/FAIL` line (run
pytest with -s to see them as they happen; a summary table prints at the
end either way). Tolerances are fixed here, not tuned at runtime.

Three sub-checks encode reference bands that the implemented dynamics
misses by a measurable margin (the mean-field tracking band at seed
exactly 1, the marginal-coupling shutoff at lambda = 1.0, and the
incoherent-ratio exponent). They are asserted as stated and fail
honestly; docs/KNOWN_ISSUES.md records the measured values and analysis.
"""

import math
import time

import numpy as np
import scipy.linalg

from gravmix import astro, meanfield, quantum, seeded, stability
from gravmix.core import TimeGrid, first_zero_crossing, fit_log_scaling

RESULTS: dict[int, tuple[bool, str]] = {}


def _report(num: int, ok: bool, detail: str) -> None:
    RESULTS[num] = (ok, detail)
    print(f"[ACCEPTANCE] criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_log_n_break_time_law():
    t0 = time.monotonic()
    scan = quantum.break_time_scan([16, 64, 256, 1024], lam=0.0, dt=1e-3)
    elapsed = time.monotonic() - t0
    law, fit = scan.law, scan.fit
    ok = (
        abs(law.coefficient - 0.65) <= 0.10
        and law.r_squared > 0.98
        and elapsed <= 60.0
        and not scan.excluded
    )
    _report(
        1,
        ok,
        f"law T = c ln N: c = {law.coefficient:.4f} (want 0.65 +- 0.10), "
        f"r2 = {law.r_squared:.4f} (> 0.98); with-intercept slope "
        f"{fit.slope:.4f} (intercept {fit.intercept:.4f}, r2 {fit.r_squared:.4f}); "
        f"runtime {elapsed:.1f}s (<= 60s)",
    )
    assert ok


def test_criterion_2_seeded_log_spacing():
    labels = [1e-4, 1e-6, 1e-8, 1e-10]  # initial photon fractions eps^2
    beams = seeded.BeamPair(512, 512, 0.0, 0.0)
    grid = TimeGrid.to(25.0, 1e-3)
    crossings = []
    worst_rel = 0.0
    for label in labels:
        eps = math.sqrt(label)
        traj = seeded.run_seeded(seeded.BeamPair(512, 512, eps, eps), grid)
        t_cross = first_zero_crossing(traj)
        closed = seeded.symmetric_crossing_time(eps)
        worst_rel = max(worst_rel, abs(t_cross - closed) / closed)
        crossings.append((1.0 / label, t_cross))
    fit = fit_log_scaling(crossings)
    ok = fit.r_squared > 0.999 and worst_rel < 0.01
    _report(
        2,
        ok,
        f"cross[]-vs-ln(1/eps^2) r2 = {fit.r_squared:.6f} (> 0.999), slope "
        f"{fit.slope:.4f}; worst closed-form mismatch {worst_rel:.2e} (< 1%)",
    )
    assert ok


def test_criterion_3_quantum_meanfield_tracking():
    n = 512
    grid = TimeGrid.to(16.0, 1e-3)
    tq = quantum.evolve_ladder(quantum.build_ladder(n), grid)
    # Seed 1 in single-quantum units on the A side reproduces the exact
    # early-time growth; see docs/KNOWN_ISSUES.md for the seeding analysis.
    tm = meanfield.run_single_mode(float(n), 1.0, 0.0, grid, seed_tau=0.0)
    cq = first_zero_crossing(tq)
    cm = first_zero_crossing(tm)
    upto = tq.times <= min(cq, cm)
    max_dev = float(np.max(np.abs(tq.zeta[upto] - tm.zeta[upto])))
    first_min = int(np.argmin(tm.zeta))
    amp_quantum = float(np.max(tq.zeta[first_min:]))
    amp_meanfield = float(np.max(tm.zeta[first_min:]))
    tracking_ok = max_dev < 0.15
    damping_ok = amp_quantum < amp_meanfield
    _report(
        3,
        tracking_ok and damping_ok,
        f"max |zeta_Q - zeta_MFT| to first crossing = {max_dev:.4f} (< 0.15 "
        f"required; crossings {cq:.3f} vs {cm:.3f}); rebound amplitudes "
        f"quantum {amp_quantum:.4f} < mean-field {amp_meanfield:.4f}: {damping_ok}",
    )
    assert damping_ok, "quantum rebound must damp below the mean-field amplitude"
    assert tracking_ok, (
        f"tracking deviation {max_dev:.4f} exceeds 0.15 at seed exactly 1 "
        "(passes at the fitted seed ~0.8; see docs/KNOWN_ISSUES.md)"
    )


def test_criterion_4_lambda_gate():
    probe = quantum.lambda_turnover_probe(256, [0.5, 1.0, 1.5], dt=1e-3)
    ok_half = probe[0.5].turned_over
    ok_one = (not probe[1.0].turned_over) and probe[1.0].min_zeta > 0.9
    ok_three_halves = (not probe[1.5].turned_over) and probe[1.5].min_zeta > 0.9
    _report(
        4,
        ok_half and ok_one and ok_three_halves,
        f"lambda=0.5 turnover at {probe[0.5].turnover_time}; lambda=1.0 min zeta "
        f"{probe[1.0].min_zeta:.4f} (> 0.9 required, turnover "
        f"{probe[1.0].turnover_time}); lambda=1.5 min zeta {probe[1.5].min_zeta:.4f}; "
        f"horizon {probe[0.5].horizon:.2f}",
    )
    assert ok_half, "lambda = 0.5 must turn over"
    assert ok_three_halves, "lambda = 1.5 must stay up"
    assert ok_one, (
        "lambda = 1.0 converts slowly (marginal coupling) and dips below 0.9 "
        "within the 5x horizon; see docs/KNOWN_ISSUES.md"
    )


def test_criterion_5_stability_growth_rates():
    worst = 0.0
    details = []
    for lam in (0.0, 0.25, 0.5, 0.75, 0.9):
        measured = stability.growth_rate_empirical(lam)
        predicted = math.sqrt(1.0 - lam * lam)
        err = abs(measured.rate - predicted)
        worst = max(worst, err)
        details.append(f"{lam}:{measured.rate:.4f}/{predicted:.4f}")
    ok = worst < 0.05
    _report(5, ok, f"measured/closed-form rates {', '.join(details)}; worst |diff| {worst:.4f} (< 0.05)")
    assert ok


def test_criterion_6_isotropic_slowdown():
    report = meanfield.beam_vs_isotropic_report(512.0, 64, 1.0)
    ratio = report.crossing_ratio
    tail = report.isotropic_tail_mean
    ok = ratio is not None and 1.4 <= ratio <= 2.6 and -0.2 <= tail <= 0.2
    _report(
        6,
        ok,
        f"break-time ratio {ratio:.4f} (in [1.4, 2.6]); long-time tail mean "
        f"{tail:+.4f} (in [-0.2, 0.2]); beams {report.beam_crossing:.3f}, "
        f"isotropic {report.isotropic_crossing:.3f}",
    )
    assert ok


def test_criterion_7_conservation_suite():
    rng = np.random.default_rng(20250809)
    worst = {"norm": 0.0, "energy": 0.0, "spin": 0.0, "charge": 0.0}

    for _ in range(8):
        n = int(rng.integers(2, 64))
        lam = float(rng.uniform(0.0, 1.5))
        horizon = float(rng.uniform(2.0, 8.0))
        traj = quantum.evolve_ladder(quantum.build_ladder(n, lam), TimeGrid.to(horizon, 1e-2))
        worst["norm"] = max(worst["norm"], float(np.max(np.abs(traj.audits["norm"] - 1.0))))
        scale = max(1.0, float(np.max(np.abs(traj.audits["energy"]))))
        worst["energy"] = max(worst["energy"], float(np.ptp(traj.audits["energy"])) / scale)

    for _ in range(8):
        n = float(rng.uniform(4.0, 4096.0))
        lam = float(rng.uniform(0.0, 1.5))
        seed = float(rng.uniform(0.01, 2.0))
        traj = meanfield.run_single_mode(n, seed, lam, TimeGrid.to(8.0, 1e-3))
        worst["spin"] = max(
            worst["spin"],
            float(np.max(np.abs(traj.audits["spin_length_a"] - 1.0))),
            float(np.max(np.abs(traj.audits["spin_length_b"] - 1.0))),
        )
        worst["charge"] = max(worst["charge"], float(np.max(np.abs(traj.audits["sum_s3_t3"]))))

    for _ in range(6):
        m = int(rng.integers(2, 12))
        n = float(rng.uniform(8.0, 1024.0))
        lam = float(rng.uniform(0.0, 1.2))
        seed = float(rng.uniform(0.05, 2.0))
        ens = meanfield.isotropic_ensemble(n, m, seed, lam)
        traj = meanfield.run_multimode(ens, TimeGrid.to(6.0, 1e-3))
        worst["spin"] = max(worst["spin"], float(np.max(traj.audits["spin_length_drift"])))
        worst["charge"] = max(worst["charge"], float(np.max(np.abs(traj.audits["sum_s3_t3"]))))

    ok = (
        worst["norm"] < 1e-9
        and worst["energy"] < 1e-8
        and worst["spin"] < 1e-7
        and worst["charge"] < 1e-8
    )
    _report(
        7,
        ok,
        "worst drifts: norm {norm:.2e} (<1e-9), energy {energy:.2e} (<1e-8 rel), "
        "spin length {spin:.2e} (<1e-7 rel), total charge {charge:.2e} (<1e-8)".format(**worst),
    )
    assert ok


def test_criterion_8_small_n_oracle_equivalence():
    worst = 0.0
    for n in (2, 3, 4, 5, 6):
        for lam in (0.0, 0.5, 1.0):
            h = quantum.build_ladder(n, lam)
            grid = TimeGrid(0.0, 8.0, 5e-4, sample_every=40)
            amps = quantum.amplitudes_at(h, grid.times())
            u = scipy.linalg.expm(-1j * h.dense(scaled=True) * grid.dt)
            psi = quantum.LadderState.all_gravitons(n).amps
            record = set(grid.sampled_steps().tolist())
            ref = [psi.copy()]
            for k in range(1, grid.n_steps + 1):
                psi = u @ psi
                if k in record:
                    ref.append(psi.copy())
            worst = max(worst, float(np.max(np.abs(amps - np.asarray(ref)))))
    ok = worst < 1e-6
    _report(8, ok, f"max |eig - dense expm| amplitude deviation {worst:.2e} (< 1e-6)")
    assert ok


def test_criterion_9_astro_numbers():
    ctx = astro.NaturalUnitContext()
    scenario = astro.MergerScenario(3.6e56, 250.0)
    density = astro.graviton_density(scenario, ctx).value
    density_ok = 1e21 <= density <= 1e23

    xi = astro.xi_figure_of_merit(1e22, ctx, frequency_hz=250.0).value
    xi_ok = 0.005 <= xi <= 0.05

    exponent = astro.incoherent_comparison(250.0, ctx).flags["exponent"]
    exponent_ok = 83.0 <= exponent <= 87.0

    _report(
        9,
        density_ok and xi_ok and exponent_ok,
        f"density {density:.3e} MeV^3 (in [1e21, 1e23]); xi at reference density "
        f"{xi:.4f} (in [0.005, 0.05]); incoherent exponent {exponent:.2f} "
        f"(85 +- 2 required)",
    )
    assert density_ok
    assert xi_ok
    assert exponent_ok, (
        f"G^-1 lambda_1^2 at 250 Hz is 10^{exponent:.2f}, outside 85 +- 2; the "
        "formula cannot reach the quoted magnitude in consistent units "
        "(see docs/KNOWN_ISSUES.md)"
    )


def test_zz_acceptance_summary():
    print("\n================ acceptance summary ================")
    for num in sorted(RESULTS):
        ok, detail = RESULTS[num]
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    print("====================================================")
