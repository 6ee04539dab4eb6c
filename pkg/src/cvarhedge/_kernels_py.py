"""Pure numpy versions of the kernels in ``_kernels.pyx``.

Same signatures and the same arithmetic order, so the two backends agree to
a few ulps; the uniforms they draw are bit-identical.
"""

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_M53 = 2.0**-53

# AS241 (PPND16) coefficients, highest degree first
_A = (2509.0809287301226727, 33430.575583588128105, 67265.770927008700853,
      45921.953931549871457, 13731.693765509461125, 1971.5909503065514427,
      133.14166789178437745, 3.387132872796366608)
_B = (5226.495278852854561, 28729.085735721942674, 39307.89580009271061,
      21213.794301586595867, 5394.1960214247511077, 687.1870074920579083,
      42.313330701600911252, 1.0)
_C = (7.7454501427834140764e-4, 0.0227238449892691845833, 0.24178072517745061177,
      1.27045825245236838258, 3.64784832476320460504, 5.7694972214606914055,
      4.6303378461565452959, 1.42343711074968357734)
_D = (1.05075007164441684324e-9, 5.475938084995344946e-4, 0.0151986665636164571966,
      0.14810397642748007459, 0.68976733498510000455, 1.6763848301838038494,
      2.05319162663775882187, 1.0)
_E = (2.01033439929228813265e-7, 2.71155556874348757815e-5, 0.0012426609473880784386,
      0.026532189526576123093, 0.29656057182850489123, 1.7848265399172913358,
      5.4637849111641143699, 6.6579046435011037772)
_F = (2.04426310338993978564e-15, 1.4215117583164458887e-7, 1.8463183175100546818e-5,
      7.868691311456132591e-4, 0.0148753612908506148525, 0.13692988092273580531,
      0.59983220655588793769, 1.0)


def _horner(coef, x):
    y = np.full_like(x, coef[0])
    for c in coef[1:]:
        y = y * x + c
    return y


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(key, start, n):
    """Counter-based uniforms in (0, 1): element ``i`` depends only on
    ``(key, start + i)``."""
    counter = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    bits = _mix(np.uint64(key) + counter * GAMMA) >> np.uint64(11)
    return (bits.astype(np.float64) + 0.5) * _TWO_M53


def ppnd16(p):
    p = np.asarray(p, dtype=np.float64)
    q = p - 0.5
    out = np.empty_like(p)
    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        out[central] = qc * _horner(_A, r) / _horner(_B, r)
    tail = ~central
    if tail.any():
        qt = q[tail]
        r = np.sqrt(-np.log(np.where(qt <= 0.0, p[tail], 1.0 - p[tail])))
        x = np.empty_like(r)
        near = r <= 5.0
        rn = r[near] - 1.6
        x[near] = _horner(_C, rn) / _horner(_D, rn)
        rf = r[~near] - 5.0
        x[~near] = _horner(_E, rf) / _horner(_F, rf)
        out[tail] = np.where(qt < 0.0, -x, x)
    return out


def fill_normals(key, start, out):
    out[:] = ppnd16(uniforms(key, start, out.shape[0]))


def gbm_terminal(key, start, s0, drift, vol, out):
    z = ppnd16(uniforms(key, start, out.shape[0]))
    out[:] = s0 * np.exp(drift + vol * z)


def portfolio_gains(prices, strikes, z, x, disc, value0, out):
    acc = x * prices
    for k, zi in zip(strikes, z):
        acc = acc + zi * np.maximum(k - prices, 0.0)
    out[:] = acc * disc - value0
