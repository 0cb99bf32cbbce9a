"""Numeric backends used by the analytic layers.

Wraps the special functions the closed forms need (Gauss hypergeometric,
incomplete gammas), provides expectations against the Gamma(M, 1) antenna
gain law, numerical inversion of Laplace-transformed CDFs, and real roots
of small polynomials.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.special as sp

from .errors import NumericalError

# ----------------------------------------------------------------------------
# special function wrappers
# ----------------------------------------------------------------------------


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric 2F1(a, b; c; z) for z <= 0.

    The analytic layer only ever calls this with non-positive argument,
    where scipy's implementation is accurate to near machine precision
    even for |z| as large as 1e9.
    """
    if z > 0:
        raise ValueError("hyp2f1 backend only supports z <= 0")
    out = sp.hyp2f1(a, b, c, z)
    if not np.isfinite(out):
        raise NumericalError(f"hyp2f1({a}, {b}, {c}, {z}) is not finite")
    return float(out)


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Unnormalized upper incomplete gamma Gamma(s, x), s > 0, x >= 0."""
    if s <= 0:
        raise ValueError("upper_incomplete_gamma needs s > 0")
    if x < 0:
        raise ValueError("upper_incomplete_gamma needs x >= 0")
    return float(sp.gammaincc(s, x) * sp.gamma(s))


def lower_incomplete_gamma_regularized(s, x):
    """Regularized lower incomplete gamma P(s, x). Vectorized in x."""
    return sp.gammainc(s, x)


# ----------------------------------------------------------------------------
# expectations against the Gamma(M, 1) antenna gain
# ----------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _laguerre_rule(nodes: int, m: int):
    # weight x^(m-1) e^(-x) on (0, inf); divide by Gamma(m) for the mean
    x, w = sp.roots_genlaguerre(nodes, m - 1)
    return x, w / sp.gamma(m)


def gamma_expectation(f: Callable, m: int, nodes: int = 64) -> float:
    """E[f(G)] for G ~ Gamma(m, 1) by generalized Gauss-Laguerre quadrature.

    The node count is doubled once and the two estimates compared; a gap
    beyond 1e-9 triggers a warning. `f` should accept numpy arrays.
    """
    if m < 1 or int(m) != m:
        raise ValueError("m must be a positive integer")
    if nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")

    def apply(n):
        x, w = _laguerre_rule(n, int(m))
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.array([f(xi) for xi in x], dtype=float)
        return float(w @ y)

    coarse = apply(nodes)
    fine = apply(2 * nodes)
    if not math.isfinite(fine):
        raise NumericalError("gamma_expectation produced a non-finite value")
    if abs(fine - coarse) > 1e-9 + 1e-12 * abs(fine):
        warnings.warn(
            f"gamma_expectation doubling gap {abs(fine - coarse):.3e} "
            f"at {nodes} nodes; integrand may be under-resolved",
            stacklevel=2,
        )
    return fine


# ----------------------------------------------------------------------------
# Laplace-transform CDF inversion
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class LaplaceInversionSettings:
    method: str = "euler"    # "euler" (Abate-Whitt) or "talbot" (fixed Talbot)
    terms: int = 18          # series terms before averaging / Talbot node pairs
    tolerance: float = 1e-7  # absolute error target on CDF values

    def __post_init__(self):
        if self.method not in ("euler", "talbot"):
            raise ValueError("method must be 'euler' or 'talbot'")
        if self.terms < 10:
            raise ValueError("terms must be at least 10")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


DEFAULT_INVERSION = LaplaceInversionSettings()


def _euler_values(transform, t, terms, m_avg=11, a_parm=18.4):
    # Abate-Whitt Euler summation with binomial averaging of the last
    # m_avg+1 partial sums. a_parm ~ 18.4 keeps the aliasing error of a
    # bounded function near 1e-8.
    k = np.arange(terms + m_avg + 1)
    s = a_parm / (2.0 * t) + 1j * math.pi * k / t
    vals = np.asarray(transform(s))
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    signs[0] = 0.5
    partial = np.cumsum(signs * vals.real)
    w = np.array([math.comb(m_avg, j) for j in range(m_avg + 1)], dtype=float)
    w /= 2.0 ** m_avg
    scale = math.exp(a_parm / 2.0) / t
    est = scale * float(w @ partial[terms:terms + m_avg + 1])
    prev = scale * float(w @ partial[terms - 1:terms + m_avg])
    return est, abs(est - prev)


def _talbot_values(transform, t, terms):
    # fixed Talbot contour (Abate-Valko), 2*terms nodes
    n = 2 * terms
    k = np.arange(1, n)
    theta = k * math.pi / n
    cot = 1.0 / np.tan(theta)
    delta = np.empty(n, dtype=complex)
    delta[0] = 2.0 * n / 5.0
    delta[1:] = (2.0 * math.pi / 5.0) * k * (cot + 1j)
    gamma = np.empty(n, dtype=complex)
    gamma[0] = 0.5 * np.exp(delta[0])
    gamma[1:] = (1.0 + 1j * theta * (1.0 + cot ** 2) - 1j * cot) * np.exp(delta[1:])
    vals = np.asarray(transform(delta / t))
    est = (2.0 / (5.0 * t)) * float(np.sum((gamma * vals).real))
    # error proxy: drop the last (most oscillatory) node pair
    est_short = (2.0 / (5.0 * t)) * float(np.sum((gamma[:-2] * vals[:-2]).real))
    return est, abs(est - est_short)


def invert_laplace_cdf(transform: Callable, t: float,
                       settings: LaplaceInversionSettings = DEFAULT_INVERSION) -> float:
    """CDF value F(t) from the Laplace transform of the density.

    `transform` maps (complex arrays of) s to E[exp(-s T)]; the CDF transform
    transform(s)/s is inverted at t and clamped into [0, 1]. t <= 0 returns 0.
    """
    if t <= 0.0:
        return 0.0
    cdf_transform = lambda s: np.asarray(transform(s)) / s
    if settings.method == "euler":
        est, err = _euler_values(cdf_transform, t, settings.terms)
    else:
        est, err = _talbot_values(cdf_transform, t, settings.terms)
    if not math.isfinite(est):
        raise NumericalError("Laplace inversion produced a non-finite value")
    if err > max(settings.tolerance, 1e-7) * 50.0:
        raise NumericalError(
            f"Laplace inversion did not settle at t={t}: change {err:.3e} "
            f"between consecutive estimates"
        )
    return min(1.0, max(0.0, est))


# ----------------------------------------------------------------------------
# real polynomial roots
# ----------------------------------------------------------------------------


def poly_roots_real(coeffs: Sequence[float]):
    """Real roots of a real polynomial, ascending coefficient order.

    Returns (roots, residuals) with residuals |p(root)| scaled by the largest
    coefficient magnitude. Degree is capped at 16; a scaled residual beyond
    1e-6 raises a numerical error.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), trim="b")
    if c.size == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    if c.size - 1 > 16:
        raise ValueError("polynomial degree above 16 is not supported")
    if c.size == 1:
        return np.empty(0), np.empty(0)
    roots = np.polynomial.polynomial.polyroots(c)
    scale = np.max(np.abs(c))
    real_mask = np.abs(roots.imag) <= 1e-8 * (1.0 + np.abs(roots.real))
    real_roots = np.sort(roots[real_mask].real)
    residuals = np.abs(np.polynomial.polynomial.polyval(real_roots, c)) / scale
    if np.any(residuals > 1e-6):
        raise NumericalError(
            f"ill-conditioned polynomial: scaled root residual "
            f"{residuals.max():.3e} exceeds 1e-6"
        )
    return real_roots, residuals
