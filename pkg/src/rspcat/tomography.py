"""Homodyne tomography round trip: sample quadrature data and reconstruct by MaxLik.

Quadrature ``x^theta = (a e^{-i theta} + a^dagger e^{i theta})/sqrt(2)`` has
eigenstates with ``<x^theta|m> = e^{-i m theta} psi_m(x)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergence, ValidationError
from .fockcore import DensityMatrix, FockVector, hermite_functions

SAMPLE_GRID = np.linspace(-8.0, 8.0, 10_000)
CSV_COLUMNS = ("theta_rad", "x")


@dataclass(frozen=True)
class QuadratureSamples:
    """Paired arrays of measurement angles and outcomes.

    Angles are mapped to ``[0, pi)``; an angle ``theta + pi`` measures
    ``-x^theta``, so the outcome sign flips along with it.
    """

    theta: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float).ravel()
        xs = np.asarray(self.x, dtype=float).ravel()
        if th.shape != xs.shape:
            raise ValidationError("theta and x must have the same length")
        if not (np.all(np.isfinite(th)) and np.all(np.isfinite(xs))):
            raise ValidationError("samples must be finite")
        th = np.mod(th, 2.0 * math.pi)
        flip = th >= math.pi
        th = np.where(flip, th - math.pi, th)
        xs = np.where(flip, -xs, xs)
        th.setflags(write=False)
        xs.setflags(write=False)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "x", xs)

    def __len__(self) -> int:
        return self.x.size

    def angles(self) -> np.ndarray:
        return np.unique(self.theta)


def _rho(state) -> np.ndarray:
    if isinstance(state, FockVector):
        v = state.normalize().amps
        return np.outer(v, v.conj())
    if isinstance(state, DensityMatrix):
        return state.normalized().elems
    return np.asarray(state, dtype=complex)


def _ket_matrix(dim: int, theta: float, xs: np.ndarray) -> np.ndarray:
    """Columns are ``<m|x^theta>`` for each x."""
    psi = hermite_functions(dim - 1, xs)
    return psi * np.exp(1j * theta * np.arange(dim))[:, None]


def marginal_pdf(state, theta: float, x):
    """Quadrature distribution ``<x^theta|rho|x^theta>``."""
    rho = _rho(state)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    v = _ket_matrix(rho.shape[0], theta, xs)
    pdf = np.einsum("mx,mn,nx->x", v.conj(), rho, v).real
    return float(pdf[0]) if np.ndim(x) == 0 else pdf


def sample(state, thetas, count_per_angle: int, seed: int) -> QuadratureSamples:
    """Draw ``count_per_angle`` outcomes per angle by inverse-CDF sampling.

    The CDF is tabulated on 10^4 points over [-8, 8] and inverted by linear
    interpolation.  Output is a deterministic function of ``seed``.
    """
    if count_per_angle < 1:
        raise ValidationError("count_per_angle must be >= 1")
    rng = np.random.default_rng(seed)
    grid = SAMPLE_GRID
    th_out, x_out = [], []
    for th in np.atleast_1d(np.asarray(thetas, dtype=float)):
        pdf = np.clip(marginal_pdf(state, th, grid), 0.0, None)
        cdf = np.concatenate(([0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))))
        cdf /= cdf[-1]
        u = rng.random(count_per_angle)
        x_out.append(np.interp(u, cdf, grid))
        th_out.append(np.full(count_per_angle, th))
    return QuadratureSamples(np.concatenate(th_out), np.concatenate(x_out))


def uniform_angles(count: int) -> np.ndarray:
    """``count`` equally spaced angles on ``[0, pi)``."""
    return np.arange(count) * math.pi / count


# ---------------------------------------------------------------------------
# maximum likelihood


@dataclass(frozen=True)
class MaxLikResult:
    rho: DensityMatrix
    log_likelihood: np.ndarray
    iterations: int
    converged: bool


def _binned_povm(samples: QuadratureSamples, dim: int, bins: int):
    """Per-bin weighted kets (shape K x 3 x dim) and observed frequencies."""
    nodes, wts = np.polynomial.legendre.leggauss(3)
    kets, freqs = [], []
    total = len(samples)
    for th in samples.angles():
        xs = samples.x[samples.theta == th]
        pad = 1e-9 + 1e-6 * (xs.max() - xs.min())
        edges = np.linspace(xs.min() - pad, xs.max() + pad, bins + 1)
        counts, _ = np.histogram(xs, edges)
        keep = counts > 0
        lo, hi = edges[:-1][keep], edges[1:][keep]
        half = 0.5 * (hi - lo)
        pts = (0.5 * (hi + lo))[:, None] + half[:, None] * nodes[None, :]
        v = _ket_matrix(dim, th, pts.ravel()).T.reshape(pts.shape + (dim,))
        kets.append(v * np.sqrt(half[:, None, None] * wts[None, :, None]))
        freqs.append(counts[keep] / total)
    return np.concatenate(kets), np.concatenate(freqs)


def _probs(kets, rho):
    return np.einsum("kqm,mn,kqn->k", kets.conj(), rho, kets).real


def _r_operator(kets, freqs, probs):
    c = freqs / probs
    return np.einsum("k,kqm,kqn->mn", c, kets, kets.conj())


def _loglik(freqs, probs):
    return float(np.dot(freqs, np.log(np.clip(probs, 1e-300, None))))


def _finish(rho, damping):
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    if damping > 0:
        rho = (1.0 - damping) * rho + damping * np.eye(rho.shape[0]) / rho.shape[0]
    return rho


def maxlik_reconstruct(
    samples: QuadratureSamples,
    cutoff: int,
    max_iters: int = 2000,
    tol: float = 1e-10,
    bins: int = 200,
    damping: float = 1e-6,
    strict: bool = False,
) -> MaxLikResult:
    """Iterative maximum-likelihood state estimate ``rho <- N[R rho R]``.

    Outcomes are histogrammed into ``bins`` bins per angle; each bin's POVM
    element integrates the quadrature projector over the bin.  A step that
    would lower the likelihood is replaced by a diluted step with
    ``(1 + eps R)`` and ``eps`` halved until the likelihood does not decrease,
    so the recorded log-likelihood is nondecreasing.  Iteration stops when the
    relative gain drops below ``tol``.

    Raises
    ------
    NonConvergence
        Only if ``strict``; the exception carries the best result.
    """
    if len(samples) == 0:
        raise ValidationError("no samples")
    dim = cutoff + 1
    kets, freqs = _binned_povm(samples, dim, bins)
    rho = np.eye(dim, dtype=complex) / dim
    probs = _probs(kets, rho)
    ll = [_loglik(freqs, probs)]
    eye = np.eye(dim)
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        r_op = _r_operator(kets, freqs, probs)
        cand = _finish(r_op @ rho @ r_op, damping)
        cp = _probs(kets, cand)
        new = _loglik(freqs, cp)
        eps = 1.0
        while new < ll[-1] and eps > 1e-8:
            eps *= 0.5
            g = eye + eps * r_op
            cand = _finish(g @ rho @ g, damping)
            cp = _probs(kets, cand)
            new = _loglik(freqs, cp)
        if new < ll[-1]:
            converged = True
            it -= 1
            break
        gain = (new - ll[-1]) / max(abs(ll[-1]), 1e-300)
        rho, probs = cand, cp
        ll.append(new)
        if gain < tol:
            converged = True
            break
    result = MaxLikResult(DensityMatrix(rho), np.array(ll), it, converged)
    if strict and not converged:
        raise NonConvergence(f"maxlik did not converge in {max_iters} iterations", result)
    return result


# ---------------------------------------------------------------------------
# CSV


def write_samples_csv(path, samples: QuadratureSamples):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for th, x in zip(samples.theta, samples.x):
            w.writerow((f"{th:.17g}", f"{x:.17g}"))


def read_samples_csv(path) -> QuadratureSamples:
    """Read a ``theta_rad,x`` CSV; errors name the offending line."""
    th, xs = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValidationError(f"{path}: empty file, expected header theta_rad,x")
        header = [h.strip() for h in header]
        for col in CSV_COLUMNS:
            if col not in header:
                raise ValidationError(f"{path}: line 1: missing column '{col}'")
        it, ix = header.index("theta_rad"), header.index("x")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                a, b = float(row[it]), float(row[ix])
            except (ValueError, IndexError):
                raise ValidationError(f"{path}: line {lineno}: cannot parse {row!r}") from None
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ValidationError(f"{path}: line {lineno}: non-finite value")
            th.append(a)
            xs.append(b)
    return QuadratureSamples(np.array(th), np.array(xs))
