# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 segment kernel. Mirrors ``_rk4_py.rk4_segment`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline void _field(const double[:, ::1] c, const double* x, double* y,
                        double* out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc
    for j in range(n):
        y[j] = (1.0 - x[j]) * x[j]
    for i in range(n):
        acc = -y[i]
        for j in range(n):
            acc += c[j, i] * y[j]
        out[i] = acc


def rk4_segment(c_in, x_in, double dt, Py_ssize_t nsteps, Py_ssize_t stride,
                double state_tol):
    cdef const double[:, ::1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t nsamp = (nsteps - 1) // stride + 1
    samples_arr = np.empty((nsamp, n), dtype=np.float64)
    cdef double[:, ::1] samples = samples_arr
    cdef const double[::1] x0 = np.ascontiguousarray(x_in, dtype=np.float64)

    cdef double* buf = <double*> malloc(8 * n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* x = buf
    cdef double* tmp = buf + n
    cdef double* y = buf + 2 * n
    cdef double* k1 = buf + 3 * n
    cdef double* k2 = buf + 4 * n
    cdef double* k3 = buf + 5 * n
    cdef double* k4 = buf + 6 * n

    cdef Py_ssize_t i, step, row = 0, fail = -1
    cdef double half = 0.5 * dt, sixth = dt / 6.0
    cdef double s, lo, hi, viol, cons, cons_max = 0.0, viol_max = 0.0

    for i in range(n):
        x[i] = x0[i]
    try:
        with nogil:
            for step in range(1, nsteps + 1):
                _field(c, x, y, k1, n)
                for i in range(n):
                    tmp[i] = x[i] + half * k1[i]
                _field(c, tmp, y, k2, n)
                for i in range(n):
                    tmp[i] = x[i] + half * k2[i]
                _field(c, tmp, y, k3, n)
                for i in range(n):
                    tmp[i] = x[i] + dt * k3[i]
                _field(c, tmp, y, k4, n)
                s = 0.0
                lo = 1.0
                hi = 0.0
                for i in range(n):
                    x[i] = x[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                    s += x[i]
                    if x[i] < lo:
                        lo = x[i]
                    if x[i] > hi:
                        hi = x[i]
                cons = fabs(s - 1.0)
                viol = 0.0
                if -lo > viol:
                    viol = -lo
                if hi - 1.0 > viol:
                    viol = hi - 1.0
                if cons > cons_max:
                    cons_max = cons
                if viol > viol_max:
                    viol_max = viol
                if viol > state_tol or cons > state_tol:
                    fail = step
                    break
                for i in range(n):
                    if x[i] < 0.0:
                        x[i] = 0.0
                if step % stride == 0 or step == nsteps:
                    for i in range(n):
                        samples[row, i] = x[i]
                    row += 1
    finally:
        free(buf)
    return samples_arr[:row], cons_max, viol_max, fail
