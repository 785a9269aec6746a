# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled escape engine: statement-by-statement mirror of _purekernel.

The complex arithmetic is written out on double pairs with exactly the
operation order CPython uses for builtin complex (naive multiply, hypot for
the modulus), and the extension is built with -ffp-contract=off, so values
are bit-identical to the pure engine.  Keep in sync with _purekernel.py.
"""

from libc.math cimport fabs, hypot, isfinite, log


def green_plus_batch(
    int[:] ncoef,
    double[:, :] coef_re,
    double[:, :] coef_im,
    double[:] delta_re,
    double[:] delta_im,
    double[:] inv_deg,
    double[:] guard,
    double[:] kq,
    double radius,
    double c_l3,
    double tail_scale,
    double two_m_max,
    double[:] xs_re,
    double[:] xs_im,
    double[:] ys_re,
    double[:] ys_im,
    double tol,
    int maxiter,
    double[:] out_value,
    double[:] out_err,
    int[:] out_iter,
    signed char[:] out_status,
):
    cdef Py_ssize_t n = xs_re.shape[0]
    cdef int m = <int>ncoef.shape[0]
    cdef Py_ssize_t idx
    cdef int q, sweeps, k, nc, done
    cdef double xr, xi, yr, yi, ax, ay, w
    cdef double acc_r, acc_i, tr, ti, nyr, nyi
    cdef double lx, ly, tail, value, err
    cdef double half_tol = 0.5 * tol

    with nogil:
        for idx in range(n):
            xr = xs_re[idx]
            xi = xs_im[idx]
            yr = ys_re[idx]
            yi = ys_im[idx]
            w = 1.0
            q = 0
            sweeps = 0
            done = 0

            # escape search
            while True:
                ax = hypot(xr, xi)
                ay = hypot(yr, yi)
                if ay > ax and ay > radius:
                    break
                if sweeps >= maxiter:
                    lx = log(ax) if ax > 1.0 else 0.0
                    ly = log(ay) if ay > 1.0 else 0.0
                    err = w * ((lx if lx > ly else ly) + c_l3)
                    out_value[idx] = 0.0
                    out_err[idx] = err
                    out_iter[idx] = sweeps
                    out_status[idx] = 0
                    done = 1
                    break
                nc = ncoef[q]
                acc_r = coef_re[q, nc - 1]
                acc_i = coef_im[q, nc - 1]
                for k in range(nc - 2, -1, -1):
                    tr = acc_r * yr - acc_i * yi
                    ti = acc_r * yi + acc_i * yr
                    acc_r = tr + coef_re[q, k]
                    acc_i = ti + coef_im[q, k]
                tr = delta_re[q] * xr - delta_im[q] * xi
                ti = delta_re[q] * xi + delta_im[q] * xr
                nyr = acc_r - tr
                nyi = acc_i - ti
                xr = yr
                xi = yi
                yr = nyr
                yi = nyi
                if not (isfinite(yr) and isfinite(yi)):
                    lx = log(ax) if ax > 1.0 else 0.0
                    ly = log(ay) if ay > 1.0 else 0.0
                    value = w * (lx if lx > ly else ly)
                    err = w * ((lx if lx > ly else ly) + c_l3)
                    out_value[idx] = value
                    out_err[idx] = err
                    out_iter[idx] = sweeps
                    out_status[idx] = 2
                    done = 1
                    break
                w *= inv_deg[q]
                q += 1
                if q == m:
                    q = 0
                    sweeps += 1

            if done:
                continue

            # refinement inside V+
            while True:
                ay = hypot(yr, yi)
                tail = w * tail_scale / ay
                if (tail <= half_tol and ay >= two_m_max) or ay > guard[q]:
                    value = w * (log(ay) + kq[q])
                    err = tail + 1e-14 * (1.0 + fabs(value))
                    out_value[idx] = value
                    out_err[idx] = err
                    out_iter[idx] = sweeps
                    out_status[idx] = 1
                    break
                nc = ncoef[q]
                acc_r = coef_re[q, nc - 1]
                acc_i = coef_im[q, nc - 1]
                for k in range(nc - 2, -1, -1):
                    tr = acc_r * yr - acc_i * yi
                    ti = acc_r * yi + acc_i * yr
                    acc_r = tr + coef_re[q, k]
                    acc_i = ti + coef_im[q, k]
                tr = delta_re[q] * xr - delta_im[q] * xi
                ti = delta_re[q] * xi + delta_im[q] * xr
                nyr = acc_r - tr
                nyi = acc_i - ti
                xr = yr
                xi = yi
                yr = nyr
                yi = nyi
                w *= inv_deg[q]
                q += 1
                if q == m:
                    q = 0
                    sweeps += 1
