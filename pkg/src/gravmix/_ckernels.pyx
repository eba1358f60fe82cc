# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stepping kernels: RK4 loops for the angle and Bloch systems.

Semantics match gravmix.kernels._python operation for operation; only the
floating-point summation order of the kernel contractions differs (plain
loops here versus BLAS there), which keeps the backends within roundoff of
each other over pre-saturation horizons.
"""

from libc.math cimport sin, isfinite

import numpy as np

cimport numpy as cnp

cnp.import_array()

from .errors import SolverError


def rk4_two_angles(double theta_a, double theta_b, double rate_a, double rate_b,
                   double dt, long n_steps, long sample_every):
    """RK4 for the seeded two-angle system; see the Python twin for details."""
    record = _record_steps(n_steps, sample_every)
    cdef long n_samples = len(record)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_samples, 2), dtype=np.float64)
    cdef long[::1] rec = np.asarray(record, dtype=np.int64)
    cdef double a = theta_a, b = theta_b
    cdef double ka1, kb1, ka2, kb2, ka3, kb3, ka4, kb4
    cdef long k, j = 0
    for k in range(n_steps + 1):
        if k == rec[j]:
            if not (isfinite(a) and isfinite(b)):
                raise SolverError(f"non-finite angles at step {k}")
            out[j, 0] = a
            out[j, 1] = b
            j += 1
            if j == n_samples:
                break
        ka1 = rate_b * sin(2.0 * b)
        kb1 = rate_a * sin(2.0 * a)
        ka2 = rate_b * sin(2.0 * (b + 0.5 * dt * kb1))
        kb2 = rate_a * sin(2.0 * (a + 0.5 * dt * ka1))
        ka3 = rate_b * sin(2.0 * (b + 0.5 * dt * kb2))
        kb3 = rate_a * sin(2.0 * (a + 0.5 * dt * ka2))
        ka4 = rate_b * sin(2.0 * (b + dt * kb3))
        kb4 = rate_a * sin(2.0 * (a + dt * ka3))
        a += (dt / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
        b += (dt / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
    return out


cdef void _bloch_rhs(double complex[::1] sp, double complex[::1] tp,
                     double[::1] s3, double[::1] t3,
                     double[:, ::1] kab, double lam, double inv_n,
                     long ma, long mb,
                     double complex[::1] dsp, double complex[::1] dtp,
                     double[::1] ds3, double[::1] dt3) noexcept:
    cdef long q, k
    cdef double complex ctp, csp, prod
    cdef double ct3, cs3
    cdef double complex minus_i = -1j
    for q in range(ma):
        ctp = 0
        ct3 = 0.0
        for k in range(mb):
            ctp = ctp + kab[q, k] * tp[k]
            ct3 = ct3 + kab[q, k] * t3[k]
        dsp[q] = minus_i * inv_n * (s3[q] * ctp + lam * ct3 * sp[q])
        prod = sp[q] * ctp.conjugate()
        ds3[q] = 4.0 * inv_n * prod.imag
    for k in range(mb):
        csp = 0
        cs3 = 0.0
        for q in range(ma):
            csp = csp + kab[q, k] * sp[q]
            cs3 = cs3 + kab[q, k] * s3[q]
        dtp[k] = minus_i * inv_n * (t3[k] * csp + lam * cs3 * tp[k])
        prod = tp[k] * csp.conjugate()
        dt3[k] = 4.0 * inv_n * prod.imag


def rk4_bloch(sp0, tp0, s30, t30, kernel, double lam, double inv_n,
              double dt, long n_steps, long sample_every):
    """RK4 for the mean-field Bloch system; see the Python twin for details."""
    record = _record_steps(n_steps, sample_every)
    cdef long n_samples = len(record)
    cdef long[::1] rec = np.asarray(record, dtype=np.int64)

    cdef double complex[::1] sp = np.array(sp0, dtype=np.complex128)
    cdef double complex[::1] tp = np.array(tp0, dtype=np.complex128)
    cdef double[::1] s3 = np.array(s30, dtype=np.float64)
    cdef double[::1] t3 = np.array(t30, dtype=np.float64)
    cdef double[:, ::1] kab = np.ascontiguousarray(kernel, dtype=np.float64)
    cdef long ma = sp.shape[0], mb = tp.shape[0]

    out_sp = np.empty((n_samples, ma), dtype=np.complex128)
    out_tp = np.empty((n_samples, mb), dtype=np.complex128)
    out_s3 = np.empty((n_samples, ma), dtype=np.float64)
    out_t3 = np.empty((n_samples, mb), dtype=np.float64)
    cdef double complex[:, ::1] osp = out_sp
    cdef double complex[:, ::1] otp = out_tp
    cdef double[:, ::1] os3 = out_s3
    cdef double[:, ::1] ot3 = out_t3

    # Stage buffers: derivative slots 1..4 plus the probed intermediate state.
    cdef double complex[::1] d1sp = np.empty(ma, dtype=np.complex128)
    cdef double complex[::1] d2sp = np.empty(ma, dtype=np.complex128)
    cdef double complex[::1] d3sp = np.empty(ma, dtype=np.complex128)
    cdef double complex[::1] d4sp = np.empty(ma, dtype=np.complex128)
    cdef double complex[::1] d1tp = np.empty(mb, dtype=np.complex128)
    cdef double complex[::1] d2tp = np.empty(mb, dtype=np.complex128)
    cdef double complex[::1] d3tp = np.empty(mb, dtype=np.complex128)
    cdef double complex[::1] d4tp = np.empty(mb, dtype=np.complex128)
    cdef double[::1] d1s3 = np.empty(ma, dtype=np.float64)
    cdef double[::1] d2s3 = np.empty(ma, dtype=np.float64)
    cdef double[::1] d3s3 = np.empty(ma, dtype=np.float64)
    cdef double[::1] d4s3 = np.empty(ma, dtype=np.float64)
    cdef double[::1] d1t3 = np.empty(mb, dtype=np.float64)
    cdef double[::1] d2t3 = np.empty(mb, dtype=np.float64)
    cdef double[::1] d3t3 = np.empty(mb, dtype=np.float64)
    cdef double[::1] d4t3 = np.empty(mb, dtype=np.float64)
    cdef double complex[::1] wsp = np.empty(ma, dtype=np.complex128)
    cdef double complex[::1] wtp = np.empty(mb, dtype=np.complex128)
    cdef double[::1] ws3 = np.empty(ma, dtype=np.float64)
    cdef double[::1] wt3 = np.empty(mb, dtype=np.float64)

    cdef long k, q, j = 0
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    cdef bint ok

    for k in range(n_steps + 1):
        if k == rec[j]:
            ok = True
            for q in range(ma):
                if not (isfinite(sp[q].real) and isfinite(sp[q].imag) and isfinite(s3[q])):
                    ok = False
            for q in range(mb):
                if not (isfinite(tp[q].real) and isfinite(tp[q].imag) and isfinite(t3[q])):
                    ok = False
            if not ok:
                raise SolverError(f"non-finite mean-field state at step {k}")
            for q in range(ma):
                osp[j, q] = sp[q]
                os3[j, q] = s3[q]
            for q in range(mb):
                otp[j, q] = tp[q]
                ot3[j, q] = t3[q]
            j += 1
            if j == n_samples:
                break

        _bloch_rhs(sp, tp, s3, t3, kab, lam, inv_n, ma, mb, d1sp, d1tp, d1s3, d1t3)
        for q in range(ma):
            wsp[q] = sp[q] + half * d1sp[q]
            ws3[q] = s3[q] + half * d1s3[q]
        for q in range(mb):
            wtp[q] = tp[q] + half * d1tp[q]
            wt3[q] = t3[q] + half * d1t3[q]
        _bloch_rhs(wsp, wtp, ws3, wt3, kab, lam, inv_n, ma, mb, d2sp, d2tp, d2s3, d2t3)
        for q in range(ma):
            wsp[q] = sp[q] + half * d2sp[q]
            ws3[q] = s3[q] + half * d2s3[q]
        for q in range(mb):
            wtp[q] = tp[q] + half * d2tp[q]
            wt3[q] = t3[q] + half * d2t3[q]
        _bloch_rhs(wsp, wtp, ws3, wt3, kab, lam, inv_n, ma, mb, d3sp, d3tp, d3s3, d3t3)
        for q in range(ma):
            wsp[q] = sp[q] + dt * d3sp[q]
            ws3[q] = s3[q] + dt * d3s3[q]
        for q in range(mb):
            wtp[q] = tp[q] + dt * d3tp[q]
            wt3[q] = t3[q] + dt * d3t3[q]
        _bloch_rhs(wsp, wtp, ws3, wt3, kab, lam, inv_n, ma, mb, d4sp, d4tp, d4s3, d4t3)
        for q in range(ma):
            sp[q] = sp[q] + sixth * (d1sp[q] + 2.0 * d2sp[q] + 2.0 * d3sp[q] + d4sp[q])
            s3[q] = s3[q] + sixth * (d1s3[q] + 2.0 * d2s3[q] + 2.0 * d3s3[q] + d4s3[q])
        for q in range(mb):
            tp[q] = tp[q] + sixth * (d1tp[q] + 2.0 * d2tp[q] + 2.0 * d3tp[q] + d4tp[q])
            t3[q] = t3[q] + sixth * (d1t3[q] + 2.0 * d2t3[q] + 2.0 * d3t3[q] + d4t3[q])

    return out_sp, out_tp, out_s3, out_t3


def _record_steps(n_steps, sample_every):
    ks = list(range(0, n_steps + 1, sample_every))
    if ks[len(ks) - 1] != n_steps:
        ks.append(n_steps)
    return ks
