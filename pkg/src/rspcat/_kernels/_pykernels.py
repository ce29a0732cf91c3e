"""NumPy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them loop for
loop.  All routines take and return plain ndarrays.
"""

import math

import numpy as np
from scipy.special import gammaln

_BIG = 1e150
_LOG_PI_QUARTER = 0.25 * math.log(math.pi)


def hermite_functions(nmax, x):
    """Normalized Hermite functions psi_0..psi_nmax at points ``x``.

    Uses the three-term recurrence for the normalized functions with a
    running log-scale, so no factorial or power of two is ever formed.
    Returns an array of shape ``(nmax + 1, len(x))``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((nmax + 1, x.size))
    log_scale = -0.5 * x * x - _LOG_PI_QUARTER
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    out[0] = np.exp(log_scale)
    for k in range(nmax):
        nxt = math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
        big = np.abs(nxt) > _BIG
        if big.any():
            s = np.where(big, np.abs(nxt), 1.0)
            nxt = nxt / s
            cur = cur / s
            log_scale = log_scale + np.log(s)
        prev, cur = cur, nxt
        out[k + 1] = cur * np.exp(log_scale)
    return out


def _xlog(e, logbase):
    # e * log(base) with the convention 0 * log(0) = 0
    if np.ndim(e):
        return np.where(e == 0, 0.0, e * logbase)
    return 0.0 if e == 0 else e * logbase


def _log_params(zeta, rs, eta):
    ch = math.cosh(rs)
    neg = -math.inf
    log_a = math.log1p(-zeta * zeta) - 2.0 * math.log(ch)
    lg = math.log(zeta / ch) if zeta > 0 else neg
    leta = math.log(eta) if eta > 0 else neg
    l1 = math.log((1.0 - eta) * ch * ch) if eta < 1 else neg
    lt = math.log(math.tanh(rs)) if rs > 0 else neg
    return log_a, lg, leta, l1, lt


def _coeff_sum(m1, m2, n1, n2, lp, lfact):
    """Vectorized-over-k evaluation of one mixed-state coefficient."""
    log_a, lg, leta, l1, lt = lp
    klo = max(0, m2 - m1)
    khi = min(m2, n2)
    if khi < klo:
        return 0.0
    k = np.arange(klo, khi + 1)
    d = m1 - m2
    lbin = (
        lfact[m2] - lfact[k] - lfact[m2 - k]
        + lfact[n2] - lfact[k] - lfact[n2 - k]
        + lfact[m1] - lfact[m2 - k] - lfact[m1 - m2 + k]
        + lfact[n1] - lfact[n2 - k] - lfact[n1 - n2 + k]
    )
    with np.errstate(invalid="ignore"):
        t = (
            log_a
            + _xlog(m2 + n2, lg)
            + _xlog(0.5 * (m2 + n2) - k, leta)
            + _xlog(k, l1)
            + _xlog(2 * (d + k), lt)
            + 0.5 * lbin
        )
    return float(np.exp(t).sum())


def mixed_block(zeta, rs, eta, kmat, nb):
    """Contract the mixed two-mode coefficients against an Alice kernel.

    Returns the real matrix ``B[m2, n2] = sum_m1 C(m1, m2, n1, n2)
    sqrt(m1 n1) kmat[m1 - 1, n1 - 1]`` with ``n1 = m1 + n2 - m2``, for
    ``0 <= m2, n2 <= nb``.  ``kmat`` is indexed by the post-subtraction
    Alice photon number and has shape ``(na, na)``.
    """
    kmat = np.asarray(kmat, dtype=float)
    na = kmat.shape[0]
    lfact = gammaln(np.arange(na + nb + 2) + 1.0)
    log_a, lg, leta, l1, lt = _log_params(zeta, rs, eta)
    out = np.zeros((nb + 1, nb + 1))
    for shift in range(nb + 1):
        m1 = np.arange(1, na + 1 - shift)
        if m1.size == 0:
            break
        n1 = m1 + shift
        kv = kmat[m1 - 1, n1 - 1] * np.sqrt(m1 * n1)
        for m2 in range(nb + 1 - shift):
            n2 = m2 + shift
            k = np.arange(m2 + 1)
            mm1 = m1[:, None]
            nn1 = n1[:, None]
            d = mm1 - m2
            valid = (k[None, :] >= m2 - mm1)
            j1 = np.where(valid, mm1 - m2 + k, 0)
            j2 = np.where(valid, nn1 - n2 + k, 0)
            lbin = (
                lfact[m2] - 2 * lfact[k] - lfact[m2 - k]
                + lfact[n2] - lfact[n2 - k]
                + lfact[mm1] - lfact[m2 - k] - lfact[j1]
                + lfact[nn1] - lfact[n2 - k] - lfact[j2]
            )
            with np.errstate(invalid="ignore"):
                t = (
                    log_a
                    + _xlog(m2 + n2, lg)
                    + _xlog(0.5 * (m2 + n2) - k, leta)
                    + _xlog(k, l1)
                    + _xlog(2 * (d + k), lt)
                    + 0.5 * lbin
                )
            c = np.exp(np.where(valid, t, -np.inf)).sum(axis=1)
            val = float(np.dot(c, kv))
            out[m2, n2] = val
            out[n2, m2] = val
    return out


def alice_weights(zeta, rs, eta, na, n2max):
    """Alice's reduced photon distribution ``w[n1] = sum_n2 C(n1, n2, n1, n2)``."""
    lfact = gammaln(np.arange(na + n2max + 2) + 1.0)
    lp = _log_params(zeta, rs, eta)
    w = np.zeros(na + 1)
    for n1 in range(na + 1):
        w[n1] = sum(_coeff_sum(n1, n2, n1, n2, lp, lfact) for n2 in range(n2max + 1))
    return w


def wigner_grid(rho, xs, ps):
    """Wigner function of ``rho`` on the grid, quadrature convention.

    Output has shape ``(len(ps), len(xs))``; vacuum gives ``1/pi`` at the
    origin.  Laguerre factors use the normalized recurrence in ``n`` at fixed
    offset ``d``, so factorial ratios never appear explicitly.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    xg, pg = np.meshgrid(np.asarray(xs, float), np.asarray(ps, float))
    rad2 = xg * xg + pg * pg
    y = 2.0 * rad2
    absz = np.sqrt(rad2)
    rot = np.where(absz > 0, (xg - 1j * pg) / np.where(absz > 0, absz, 1.0), 1.0)
    with np.errstate(divide="ignore"):
        logy = np.log(y)
    total = np.zeros(xg.shape)
    rot_d = np.ones(xg.shape, dtype=complex)
    for d in range(dim):
        if d == 0:
            h_cur = np.exp(-0.5 * y)
        else:
            h_cur = np.where(y > 0, np.exp(-0.5 * y + 0.5 * d * logy - 0.5 * math.lgamma(d + 1)), 0.0)
        h_prev = np.zeros(xg.shape)
        acc = np.zeros(xg.shape, dtype=complex)
        for n in range(dim - d):
            acc += ((-1) ** n) * rho[n + d, n] * h_cur
            h_next = ((2 * n + 1 + d - y) * h_cur - math.sqrt(n * (n + d)) * h_prev) / math.sqrt(
                (n + 1) * (n + 1 + d)
            )
            h_prev, h_cur = h_cur, h_next
        if d == 0:
            total += acc.real
        else:
            total += 2.0 * (rot_d * acc).real
        rot_d = rot_d * rot
    return total / math.pi
