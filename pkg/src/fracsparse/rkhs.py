"""Gram entries, kernel norms and data inner products.

The dictionary element at q = (t, x) is the spatial kernel centered at x with
scale t; its L2 inner products drive everything downstream:

* heat family: the Gram entry collapses by the semigroup identity to a single
  kernel evaluation K(alpha, t+s, x-y), no quadrature;
* Poisson family: no semigroup identity for general order, so the Gram entry
  is the spatial product integral, computed adaptively.

All Gram and norm values are cached per context, keyed by parameters rounded
at 1e-12 granularity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .kernels import (
    HalfSpacePoint,
    KernelFamily,
    heat_kernel,
    heat_kernel_batch,
    poisson_kernel,
    poisson_normalizer,
)
from .quadrature import QuadratureSpec, integrate_adaptive

__all__ = [
    "DataFunction",
    "GramContext",
    "gram",
    "norm_sq",
    "data_kernel_inner",
    "normalized_objective_k1",
    "kernel_slice",
]

_DEFAULT_SPEC = QuadratureSpec()


def _key(*values):
    return tuple(round(v * 1e12) for v in values)


@dataclass
class DataFunction:
    """Initial/boundary datum: an evaluable function with a truncation
    window [-window, window] for L2 quadrature.

    ``evaluate`` must accept numpy arrays.  The squared L2 norm over the
    window is computed lazily and cached.
    """

    evaluate: callable
    window: float
    quad: QuadratureSpec = _DEFAULT_SPEC
    _norm_sq: float | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.window > 0:
            raise ValueError("window must be positive")
        # tail heuristic: the window should already hold essentially all of
        # the L2 mass
        sq = lambda z: np.asarray(self.evaluate(z)) ** 2
        inner = integrate_adaptive(sq, -self.window, self.window, self.quad)
        outer = inner
        for a, b in ((-2 * self.window, -self.window), (self.window, 2 * self.window)):
            outer += integrate_adaptive(sq, a, b, self.quad)
        if inner <= 0:
            raise ValueError("datum vanishes on its window")
        if outer - inner > 1e-4 * outer:
            warnings.warn(
                "datum carries noticeable L2 mass outside its window "
                f"(relative tail {((outer - inner) / outer):.2e})",
                stacklevel=2,
            )
        self._norm_sq = inner

    @property
    def norm_sq(self):
        return self._norm_sq

    @property
    def norm(self):
        return math.sqrt(self._norm_sq)


@dataclass
class GramContext:
    """Kernel family plus quadrature policy, with memoized Gram entries."""

    family: KernelFamily
    quad: QuadratureSpec = _DEFAULT_SPEC
    _gram_cache: dict = field(default_factory=dict, repr=False)
    _inner_cache: dict = field(default_factory=dict, repr=False)


def kernel_slice(family, t, dx):
    """Spatial kernel of the family at scale t, evaluated on offsets dx."""
    if family.kind == "heat":
        return heat_kernel_batch(family.order, t, dx)
    return poisson_kernel(family.order, t, dx)


def norm_sq(ctx, q):
    """Squared dictionary-kernel norm at q; closed forms for both families.

    Heat: Gamma(1 + 1/(2 alpha)) / (pi * (2t)^(1/(2 alpha))), the Gram entry
    at zero offset and doubled scale.  Poisson: c(1, sigma)^2 * B(sigma) / t
    with B(sigma) = sqrt(pi) * Gamma(sigma + 1/2) / Gamma(sigma + 1).
    """
    fam = ctx.family
    if fam.kind == "heat":
        alpha = fam.order
        inv = 1.0 / (2.0 * alpha)
        return math.exp(gammaln(1.0 + inv)) / (math.pi * (2.0 * q.t) ** inv)
    sigma = fam.order
    b_sigma = math.sqrt(math.pi) * math.exp(gammaln(sigma + 0.5) - gammaln(sigma + 1.0))
    return poisson_normalizer(sigma) ** 2 * b_sigma / q.t


def _poisson_gram_quadrature(sigma, q, p, spec):
    """Spatial product integral of two fractional Poisson kernels."""
    c = poisson_normalizer(sigma)
    scale_guess = max(
        poisson_kernel(sigma, q.t + p.t, q.x - p.x), c**2 * (q.t * p.t) ** sigma
    )
    # beyond radius R from the farther center the integrand is below
    # c^2 (t s)^sigma / z^(2(1+sigma)); pick R so that tail mass is negligible
    tail_coef = c**2 * (q.t**sigma) * (p.t**sigma) / (1.0 + 2.0 * sigma)
    radius = (tail_coef / (spec.tail_tol * scale_guess)) ** (1.0 / (1.0 + 2.0 * sigma))
    radius = max(radius, 10.0 * (q.t + p.t))
    lo = min(q.x, p.x) - radius
    hi = max(q.x, p.x) + radius

    def integrand(z):
        return poisson_kernel(sigma, q.t, q.x - z) * poisson_kernel(sigma, p.t, p.x - z)

    edges = sorted({lo, q.x, p.x, hi})
    return math.fsum(
        integrate_adaptive(integrand, a, b, spec) for a, b in zip(edges, edges[1:])
    )


def gram(ctx, q, p):
    """Gram entry <h_q, h_p> for dictionary parameters q, p.

    Heat family: semigroup identity, a single kernel evaluation at combined
    scale t+s and offset x-y.  Poisson family: adaptive product integral.
    Symmetric in (q, p).
    """
    fam = ctx.family
    if fam.kind == "heat":
        # batch evaluator: closed forms at alpha in {1/2, 1}, spline-backed
        # unit-scale evaluation otherwise (much faster than fresh quadrature)
        return float(heat_kernel_batch(fam.order, q.t + p.t, q.x - p.x))
    a, b = sorted(((q.t, q.x), (p.t, p.x)))
    if a == b:
        # the diagonal has an exact closed form; using it keeps normalized
        # self-inner-products at exactly 1 instead of 1 + quadrature error
        return norm_sq(ctx, q)
    key = _key(*a, *b)
    cached = ctx._gram_cache.get(key)
    if cached is None:
        cached = _poisson_gram_quadrature(fam.order, q, p, ctx.quad)
        ctx._gram_cache[key] = cached
    return cached


def _inner_window(ctx, f, q):
    fam = ctx.family
    ext = max(10.0 * q.t ** (1.0 / (2.0 * fam.order)), 10.0 * q.t)
    lo = min(-f.window, q.x) - ext
    hi = max(f.window, q.x) + ext
    return lo, hi


def data_kernel_inner(ctx, f, q):
    """L2 inner product of the datum with the dictionary kernel at q.

    This is also the exact solution value u(q) of the underlying problem.
    """
    key = _key(q.t, q.x) + (id(f),)
    cached = ctx._inner_cache.get(key)
    if cached is not None:
        return cached
    fam = ctx.family
    lo, hi = _inner_window(ctx, f, q)

    def integrand(z):
        return np.asarray(f.evaluate(z)) * kernel_slice(fam, q.t, q.x - z)

    edges = sorted({lo, -f.window, q.x, f.window, hi})
    value = math.fsum(
        integrate_adaptive(integrand, a, b, ctx.quad) for a, b in zip(edges, edges[1:])
    )
    ctx._inner_cache[key] = value
    return value


def normalized_objective_k1(ctx, f, q):
    """First-step selection objective |<f, E_q>| with E_q the unit-norm
    kernel at q."""
    return abs(data_kernel_inner(ctx, f, q)) / math.sqrt(norm_sq(ctx, q))
