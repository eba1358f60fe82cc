"""NumPy fallback implementations of the hot stepping kernels.

These mirror the compiled extension in `gravmix._ckernels` operation for
operation; the two backends must agree to roundoff over pre-saturation
horizons (see tests/test_kernels.py).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import SolverError


def rk4_two_angles(theta_a, theta_b, rate_a, rate_b, dt, n_steps, sample_every):
    """RK4 for the seeded two-angle system.

    d(theta_a)/dtau = rate_b * sin(2 theta_b)
    d(theta_b)/dtau = rate_a * sin(2 theta_a)

    Returns an (n_samples, 2) array of angles at the recorded steps.
    """
    record = _record_steps(n_steps, sample_every)
    out = np.empty((len(record), 2), dtype=float)
    a, b = float(theta_a), float(theta_b)
    j = 0
    for k in range(n_steps + 1):
        if k == record[j]:
            if not (math.isfinite(a) and math.isfinite(b)):
                raise SolverError(f"non-finite angles at step {k}")
            out[j, 0] = a
            out[j, 1] = b
            j += 1
            if j == len(record):
                break
        ka1 = rate_b * math.sin(2.0 * b)
        kb1 = rate_a * math.sin(2.0 * a)
        ka2 = rate_b * math.sin(2.0 * (b + 0.5 * dt * kb1))
        kb2 = rate_a * math.sin(2.0 * (a + 0.5 * dt * ka1))
        ka3 = rate_b * math.sin(2.0 * (b + 0.5 * dt * kb2))
        kb3 = rate_a * math.sin(2.0 * (a + 0.5 * dt * ka2))
        ka4 = rate_b * math.sin(2.0 * (b + dt * kb3))
        kb4 = rate_a * math.sin(2.0 * (a + dt * ka3))
        a += (dt / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
        b += (dt / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
    return out


def rk4_bloch(sp0, tp0, s30, t30, kernel, lam, inv_n, dt, n_steps, sample_every):
    """RK4 for the mean-field Bloch system (M modes per cloud).

    State per mode: complex raising expectation and real third component,
    for the sigma (A) and tau (B) clouds. ``kernel`` is the (M_A, M_B)
    coupling matrix; ``inv_n`` rescales raw bilinear products to
    dimensionless time.

    Returns (sp, tp, s3, t3) sampled arrays with shape (n_samples, M).
    """
    record = _record_steps(n_steps, sample_every)
    sp = np.array(sp0, dtype=complex)
    tp = np.array(tp0, dtype=complex)
    s3 = np.array(s30, dtype=float)
    t3 = np.array(t30, dtype=float)
    k_ab = np.asarray(kernel, dtype=float)
    k_ba = k_ab.T.copy()

    n_samples = len(record)
    out_sp = np.empty((n_samples, sp.size), dtype=complex)
    out_tp = np.empty((n_samples, tp.size), dtype=complex)
    out_s3 = np.empty((n_samples, s3.size), dtype=float)
    out_t3 = np.empty((n_samples, t3.size), dtype=float)

    def rhs(sp, tp, s3, t3):
        ctp = k_ab @ tp
        ct3 = k_ab @ t3
        csp = k_ba @ sp
        cs3 = k_ba @ s3
        dsp = -1j * inv_n * (s3 * ctp + lam * ct3 * sp)
        dtp = -1j * inv_n * (t3 * csp + lam * cs3 * tp)
        ds3 = 4.0 * inv_n * np.imag(sp * np.conj(ctp))
        dt3 = 4.0 * inv_n * np.imag(tp * np.conj(csp))
        return dsp, dtp, ds3, dt3

    j = 0
    for k in range(n_steps + 1):
        if k == record[j]:
            if not (
                np.all(np.isfinite(sp))
                and np.all(np.isfinite(tp))
                and np.all(np.isfinite(s3))
                and np.all(np.isfinite(t3))
            ):
                raise SolverError(f"non-finite mean-field state at step {k}")
            out_sp[j] = sp
            out_tp[j] = tp
            out_s3[j] = s3
            out_t3[j] = t3
            j += 1
            if j == n_samples:
                break
        d1 = rhs(sp, tp, s3, t3)
        d2 = rhs(
            sp + 0.5 * dt * d1[0], tp + 0.5 * dt * d1[1], s3 + 0.5 * dt * d1[2], t3 + 0.5 * dt * d1[3]
        )
        d3 = rhs(
            sp + 0.5 * dt * d2[0], tp + 0.5 * dt * d2[1], s3 + 0.5 * dt * d2[2], t3 + 0.5 * dt * d2[3]
        )
        d4 = rhs(sp + dt * d3[0], tp + dt * d3[1], s3 + dt * d3[2], t3 + dt * d3[3])
        sp = sp + (dt / 6.0) * (d1[0] + 2.0 * d2[0] + 2.0 * d3[0] + d4[0])
        tp = tp + (dt / 6.0) * (d1[1] + 2.0 * d2[1] + 2.0 * d3[1] + d4[1])
        s3 = s3 + (dt / 6.0) * (d1[2] + 2.0 * d2[2] + 2.0 * d3[2] + d4[2])
        t3 = t3 + (dt / 6.0) * (d1[3] + 2.0 * d2[3] + 2.0 * d3[3] + d4[3])
    return out_sp, out_tp, out_s3, out_t3


def _record_steps(n_steps, sample_every):
    ks = list(range(0, n_steps + 1, sample_every))
    if ks[-1] != n_steps:
        ks.append(n_steps)
    return ks
