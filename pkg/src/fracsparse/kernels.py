"""Pointwise kernels on the upper half-plane (spatial dimension 1).

Two families:

* fractional heat kernel of order alpha in (0, 1], the inverse Fourier
  transform of exp(-t*|xi|^(2*alpha)); Gaussian at alpha = 1, Cauchy at
  alpha = 1/2;
* fractional Poisson kernel of order sigma > 0, the convolution kernel of
  the degenerate-elliptic extension to the half-plane.

General-order heat kernel values come from an oscillatory cosine transform.
Batch evaluation goes through a per-order cached evaluator: a cubic spline of
the unit-scale kernel built by shared-panel quadrature, plus an asymptotic
power series for the far tail, glued by the scaling law
K(alpha, t, x) = t^(-1/(2*alpha)) * K(alpha, 1, x * t^(-1/(2*alpha))).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gammaln

from .quadrature import QuadratureSpec, integrate_oscillatory_cosine

__all__ = [
    "KernelFamily",
    "HalfSpacePoint",
    "heat_kernel",
    "heat_kernel_batch",
    "heat_kernel_envelope_check",
    "poisson_kernel",
    "poisson_normalizer",
    "g_sigma",
]

_DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class KernelFamily:
    """Dictionary choice: fractional heat (order alpha) or fractional
    Poisson (order sigma)."""

    kind: str  # "heat" | "poisson"
    order: float

    def __post_init__(self):
        if self.kind == "heat":
            if not 0.0 < self.order <= 1.0:
                raise ValueError("heat order must lie in (0, 1]")
        elif self.kind == "poisson":
            if not self.order > 0.0:
                raise ValueError("poisson order must be positive")
        else:
            raise ValueError(f"unknown kernel family {self.kind!r}")

    @classmethod
    def heat(cls, alpha):
        return cls("heat", float(alpha))

    @classmethod
    def poisson(cls, sigma):
        return cls("poisson", float(sigma))


@dataclass(frozen=True)
class HalfSpacePoint:
    """Dictionary parameter q = (t, x), t > 0."""

    t: float
    x: float

    def __post_init__(self):
        if not (self.t > 0.0 and math.isfinite(self.t)):
            raise ValueError("t must be positive and finite")
        if not math.isfinite(self.x):
            raise ValueError("x must be finite")


def _heat_closed_form(alpha, t, x):
    ax = np.abs(x)
    if alpha == 1.0:
        return np.exp(-(ax * ax) / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
    if alpha == 0.5:
        return (t / math.pi) / (t * t + ax * ax)
    return None


def heat_kernel(alpha, t, x, spec=_DEFAULT_SPEC, method="auto"):
    """Fractional heat kernel K at scale t, offset x.

    ``method="auto"`` dispatches to the Gaussian/Cauchy closed forms at
    alpha = 1 and alpha = 1/2; ``method="quadrature"`` forces the cosine
    transform (1/pi) * int_0^inf exp(-t*r^(2*alpha)) * cos(|x|*r) dr.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if not t > 0.0:
        raise ValueError("t must be positive")
    if method == "auto":
        cf = _heat_closed_form(alpha, t, x)
        if cf is not None:
            return float(cf)
    elif method != "quadrature":
        raise ValueError("method must be 'auto' or 'quadrature'")

    two_alpha = 2.0 * alpha

    def envelope(r):
        return np.exp(-t * np.abs(r) ** two_alpha)

    freq = abs(float(x))
    value = integrate_oscillatory_cosine(envelope, freq, spec) / math.pi
    # envelope mass sets the cancellation scale of the cosine transform; deep
    # in the tail (Gaussian-like decay) double precision loses all relative
    # accuracy, so redo those points in extended precision
    mass = math.exp(gammaln(1.0 + 1.0 / two_alpha)) * t ** (-1.0 / two_alpha) / math.pi
    # for alpha < 1 the polynomial tail keeps the value well above the
    # cancellation noise floor; only near-Gaussian decay needs rescue
    floor = 1e-3 if alpha == 1.0 else 1e-10
    if abs(value) < floor * mass:
        return _heat_fourier_mp(alpha, t, freq, mass)
    return value


def _heat_fourier_mp(alpha, t, freq, mass):
    """Cosine transform of exp(-t*r^(2*alpha)) in extended precision.

    Working precision follows the cancellation ratio between the envelope
    mass and a closed-form magnitude guess; panels end at the cosine zeros.
    """
    import mpmath as mp

    # magnitude guess: polynomial tail term for alpha < 1, Gaussian for
    # alpha near 1 (whichever dominates)
    poly = 0.0
    if freq > 0 and alpha < 1.0:
        poly = (
            math.exp(gammaln(1.0 + 2.0 * alpha))
            * abs(math.sin(math.pi * alpha))
            * t
            * freq ** (-1.0 - 2.0 * alpha)
            / math.pi
        )
    gauss = float(_heat_closed_form(1.0, t, freq))
    guess = max(poly, gauss, mass * 1e-300)
    dps = 25 + max(0, int(math.log10(mass / guess)))
    with mp.workdps(dps):
        mt = mp.mpf(t)
        ta = 2 * mp.mpf(alpha)
        w = mp.mpf(freq)

        def g(r):
            return mp.e ** (-mt * r**ta) * mp.cos(w * r)

        # radius where the envelope is negligible at this precision
        radius = ((dps + 10) * mp.log(10) / mt) ** (1 / ta)
        if w == 0:
            val = mp.quad(g, [0, radius])
        else:
            half = mp.pi / w
            n = int(mp.floor(radius / half)) + 1
            val = mp.quad(g, [k * half for k in range(n + 1)])
        return float(val / mp.pi)


# ---------------------------------------------------------------------------
# batch evaluation of the general-order heat kernel


def _shared_panel_cosine(envelope, freqs, radius, order=16, graded_splits=30):
    """Cosine transforms int_0^radius envelope(r)*cos(w*r) dr for a sorted
    block of frequencies, on one shared panelization.

    Panels are half-periods of the largest frequency, so the integrand is
    resolved for every frequency in the block; the leading panel is split
    geometrically toward 0 to absorb the r^(2*alpha) cusp of the envelope.
    """
    w_max = freqs[-1]
    width = radius / 8.0 if w_max <= 0 else min(math.pi / w_max, radius / 8.0)
    n_uniform = int(math.ceil(radius / width))
    edges = np.linspace(0.0, radius, n_uniform + 1)
    graded = edges[1] * 0.5 ** np.arange(graded_splits, 0, -1)
    edges = np.concatenate(([0.0], graded, edges[1:]))

    nodes, weights = np.polynomial.legendre.leggauss(order)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * (edges[1:] - edges[:-1])
    r = (mids[:, None] + halves[:, None] * nodes[None, :]).ravel()
    w = (halves[:, None] * weights[None, :]).ravel()
    ew = envelope(r) * w
    return np.cos(np.outer(freqs, r)) @ ew


class _HeatUnitScaleEvaluator:
    """K(alpha, 1, u) for one alpha: spline on [0, U], power series beyond."""

    SPLINE_EXTENT = 50.0
    _MAX_SERIES_TERMS = 40

    def __init__(self, alpha):
        self.alpha = alpha
        two_alpha = 2.0 * alpha
        # envelope tail below ~1e-20 at the truncation radius
        self.radius = (46.0) ** (1.0 / two_alpha)

        # spline pitch from the 4th-derivative bound
        # |K''''| <= (1/pi) * Gamma(5/(2 alpha)) / (2 alpha)
        m4 = math.exp(gammaln(5.0 / two_alpha)) / (two_alpha * math.pi)
        pitch = (384.0 * 1e-10 / m4) ** 0.25
        pitch = min(max(pitch, 2e-4), 0.05)
        grid = np.arange(0.0, self.SPLINE_EXTENT + pitch, pitch)

        def envelope(r):
            return np.exp(-np.abs(r) ** two_alpha)

        vals = np.empty_like(grid)
        pos = 0
        while pos < grid.size:
            block = grid[pos : pos + 64]
            budget = 4_000_000
            est_nodes = int(16 * self.radius / max(math.pi / max(block[-1], 1e-9), self.radius / 8.0)) + 500
            take = max(1, min(64, budget // max(est_nodes, 1)))
            block = grid[pos : pos + take]
            vals[pos : pos + take] = (
                _shared_panel_cosine(envelope, block, self.radius) / math.pi
            )
            pos += take

        self._spline = CubicSpline(grid, vals, bc_type=((1, 0.0), "natural"))

        # tail series coefficients: K(u) ~ (1/pi) * sum_m
        #   (-1)^(m+1) Gamma(2 alpha m + 1) sin(pi alpha m) / m! * u^-(2 alpha m + 1)
        m = np.arange(1, self._MAX_SERIES_TERMS + 1)
        log_mag = gammaln(two_alpha * m + 1.0) - gammaln(m + 1.0)
        sign = np.where(m % 2 == 1, 1.0, -1.0) * np.sin(np.pi * alpha * m)
        self._tail_coef = sign * np.exp(log_mag) / math.pi
        self._tail_pow = two_alpha * m + 1.0

    def _tail(self, u):
        # truncate where terms stop decreasing at the smallest argument
        u_min = float(np.min(u))
        mags = np.abs(self._tail_coef) * u_min ** (-self._tail_pow)
        n = self._MAX_SERIES_TERMS
        growing = np.nonzero(mags[1:] > mags[:-1])[0]
        if growing.size:
            n = int(growing[0]) + 1
        coef = self._tail_coef[:n]
        pows = self._tail_pow[:n]
        return (u[:, None] ** (-pows[None, :])) @ coef

    def __call__(self, u):
        u = np.abs(np.asarray(u, dtype=float))
        out = np.empty_like(u)
        near = u <= self.SPLINE_EXTENT
        if np.any(near):
            out[near] = self._spline(u[near])
        if np.any(~near):
            out[~near] = self._tail(u[~near])
        return out


_evaluators: dict[float, _HeatUnitScaleEvaluator] = {}
_evaluators_lock = threading.Lock()


def _unit_scale_evaluator(alpha):
    ev = _evaluators.get(alpha)
    if ev is None:
        with _evaluators_lock:
            ev = _evaluators.get(alpha)
            if ev is None:
                ev = _HeatUnitScaleEvaluator(alpha)
                _evaluators[alpha] = ev
    return ev


def heat_kernel_batch(alpha, t, x):
    """Vectorized fractional heat kernel over an array of offsets."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    cf = _heat_closed_form(alpha, t, x)
    if cf is not None:
        return cf
    scale = t ** (-1.0 / (2.0 * alpha))
    return scale * _unit_scale_evaluator(alpha)(x * scale)


def heat_kernel_envelope_check(alpha, t, x, c_lower=0.01, c_upper=100.0):
    """Two-sided envelope sanity check for the heat kernel.

    Returns whether c_lower <= K * (t^(1/(2 alpha)) + |x|)^(1 + 2 alpha) / t
    <= c_upper.  At alpha = 1 the Gaussian beats the power envelope, so the
    check is only meaningful on a bounded range of |x| / t^(1/2).
    """
    value = heat_kernel(alpha, t, x)
    ratio = value * (t ** (1.0 / (2.0 * alpha)) + abs(x)) ** (1.0 + 2.0 * alpha) / t
    return c_lower <= ratio <= c_upper


# ---------------------------------------------------------------------------
# fractional Poisson kernel


def poisson_normalizer(sigma):
    """Normalizing constant making the fractional Poisson kernel a
    probability density: Gamma((1+sigma)/2) / (sqrt(pi) * Gamma(sigma/2))."""
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    return math.exp(
        gammaln((1.0 + sigma) / 2.0) - gammaln(sigma / 2.0)
    ) / math.sqrt(math.pi)


def poisson_kernel(sigma, t, x):
    """Fractional Poisson kernel c(1, sigma) * t^sigma / (x^2 + t^2)^((1+sigma)/2).

    Accepts scalar or array x.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    out = poisson_normalizer(sigma) * t**sigma / (x * x + t * t) ** ((1.0 + sigma) / 2.0)
    return float(out) if out.ndim == 0 else out


def g_sigma(sigma, r, spec=_DEFAULT_SPEC):
    """Fourier transform (2*pi*i convention) of (1 + x^2)^(-(1+sigma)/2).

    Evaluates 2 * int_0^inf cos(2*pi*r*x) / (1 + x^2)^((1+sigma)/2) dx.
    Used only as a frequency-side cross-check for Poisson Gram entries.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    if r < 0:
        raise ValueError("r must be nonnegative")
    power = (1.0 + sigma) / 2.0

    def envelope(x):
        return (1.0 + x * x) ** (-power)

    return 2.0 * integrate_oscillatory_cosine(envelope, 2.0 * math.pi * r, spec)
