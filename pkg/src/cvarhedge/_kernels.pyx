# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernels. ``_kernels_py`` mirrors every function."""

from libc.math cimport exp, fabs, log, sqrt
from libc.stdint cimport uint64_t

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef double TWO_M53 = 1.1102230246251565e-16


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t counter) noexcept nogil:
    return (<double>(_mix(key + counter * GAMMA) >> 11) + 0.5) * TWO_M53


cdef double _ppnd16(double p) noexcept nogil:
    cdef double q = p - 0.5
    cdef double r, x, num, den
    if fabs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2509.0809287301226727 * r + 33430.575583588128105) * r
                    + 67265.770927008700853) * r + 45921.953931549871457) * r
                  + 13731.693765509461125) * r + 1971.5909503065514427) * r
                + 133.14166789178437745) * r + 3.387132872796366608)
        den = (((((((5226.495278852854561 * r + 28729.085735721942674) * r
                    + 39307.89580009271061) * r + 21213.794301586595867) * r
                  + 5394.1960214247511077) * r + 687.1870074920579083) * r
                + 42.313330701600911252) * r + 1.0)
        return q * num / den
    if q <= 0.0:
        r = sqrt(-log(p))
    else:
        r = sqrt(-log(1.0 - p))
    if r <= 5.0:
        r = r - 1.6
        num = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r
                    + 0.24178072517745061177) * r + 1.27045825245236838258) * r
                  + 3.64784832476320460504) * r + 5.7694972214606914055) * r
                + 4.6303378461565452959) * r + 1.42343711074968357734)
        den = (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r
                    + 0.0151986665636164571966) * r + 0.14810397642748007459) * r
                  + 0.68976733498510000455) * r + 1.6763848301838038494) * r
                + 2.05319162663775882187) * r + 1.0)
    else:
        r = r - 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 0.0012426609473880784386) * r + 0.026532189526576123093) * r
                  + 0.29656057182850489123) * r + 1.7848265399172913358) * r
                + 5.4637849111641143699) * r + 6.6579046435011037772)
        den = (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r
                    + 1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r
                  + 0.0148753612908506148525) * r + 0.13692988092273580531) * r
                + 0.59983220655588793769) * r + 1.0)
    x = num / den
    if q < 0.0:
        return -x
    return x


def uniforms(uint64_t key, uint64_t start, Py_ssize_t n):
    import numpy as np
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] buf = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            buf[i] = _uniform(key, start + <uint64_t>i + 1)
    return out


def ppnd16(p):
    import numpy as np
    arr = np.ascontiguousarray(p, dtype=np.float64)
    out = np.empty_like(arr)
    cdef const double[::1] src = arr.reshape(-1)
    cdef double[::1] dst = out.reshape(-1)
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = _ppnd16(src[i])
    return out


def fill_normals(uint64_t key, uint64_t start, double[::1] out):
    cdef Py_ssize_t i
    with nogil:
        for i in range(out.shape[0]):
            out[i] = _ppnd16(_uniform(key, start + <uint64_t>i + 1))


def gbm_terminal(uint64_t key, uint64_t start, double s0, double drift, double vol,
                 double[::1] out):
    cdef Py_ssize_t i
    with nogil:
        for i in range(out.shape[0]):
            out[i] = s0 * exp(drift + vol * _ppnd16(_uniform(key, start + <uint64_t>i + 1)))


def portfolio_gains(const double[::1] prices, const double[::1] strikes,
                    const double[::1] z, double x, double disc, double value0,
                    double[::1] out):
    cdef Py_ssize_t i, j
    cdef Py_ssize_t n = strikes.shape[0]
    cdef double s, acc, payoff
    with nogil:
        for i in range(prices.shape[0]):
            s = prices[i]
            acc = x * s
            for j in range(n):
                payoff = strikes[j] - s
                if payoff > 0.0:
                    acc = acc + z[j] * payoff
            out[i] = acc * disc - value0
