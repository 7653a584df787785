"""Independent brute-force validators.

These deliberately avoid the production shortcuts: the convolution Gram
ignores the semigroup identity, the frequency-side Poisson Gram ignores the
spatial product integral, and the sampled Gram-Schmidt ignores the
Gram-entry recursion.  Each agreement between an oracle and its production
counterpart is a correctness check; the CLI ``verify`` subcommand runs them
in the field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import HalfSpacePoint, g_sigma, heat_kernel_batch, poisson_normalizer
from .quadrature import QuadratureSpec, integrate_adaptive
from .rkhs import GramContext, kernel_slice, norm_sq
from .greedy import preortho_objective, DegenerateCandidateError

__all__ = [
    "OracleGrid",
    "convolution_gram_oracle",
    "plancherel_gram_oracle",
    "functional_gs_oracle",
    "exhaustive_argmax_oracle",
]

_DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class OracleGrid:
    """Uniform sampling grid on [-extent, extent]."""

    spacing: float
    extent: float

    def __post_init__(self):
        if not (self.spacing > 0 and self.extent > 0):
            raise ValueError("spacing and extent must be positive")
        if self.spacing > self.extent / 100.0:
            raise ValueError("grid needs at least 201 nodes")

    def nodes(self):
        n = int(round(self.extent / self.spacing))
        return np.linspace(-self.extent, self.extent, 2 * n + 1)


def convolution_gram_oracle(alpha, q, p, grid, spec=_DEFAULT_SPEC):
    """Heat Gram entry as the literal product integral of the two kernels.

    Certifies the semigroup shortcut; at alpha = 1/2 and alpha = 1 it
    reproduces the classical Poisson and Gaussian superposition identities.
    """

    def integrand(z):
        return heat_kernel_batch(alpha, q.t, q.x - z) * heat_kernel_batch(
            alpha, p.t, p.x - z
        )

    ext = grid.extent
    # geometric ladders of split points around each kernel center keep the
    # adaptive rule from accepting a wide panel whose localized mass its
    # samples missed (fast-decaying kernels on a huge domain)
    edges = {-ext, ext}
    for center, t in ((q.x, q.t), (p.x, p.t)):
        width = t ** (1.0 / (2.0 * alpha))
        edges.add(center)
        step = width
        while step < 2.0 * ext:
            edges.add(center - step)
            edges.add(center + step)
            step *= 2.0
    edges = sorted(e for e in edges if -ext <= e <= ext)
    return math.fsum(
        integrate_adaptive(integrand, a, b, spec) for a, b in zip(edges, edges[1:])
    )


def plancherel_gram_oracle(sigma, q, p, spec=_DEFAULT_SPEC):
    """Poisson Gram entry computed entirely on the frequency side.

    With the 2*pi-frequency transform G of the unit-scale kernel profile,
    the Gram entry is 2 c^2 int_0^inf G(t nu) G(s nu) cos(2 pi nu (x-y)) dnu.
    The transform decays exponentially, so the integral is truncated where
    both factors are negligible.
    """
    c = poisson_normalizer(sigma)
    t, s = q.t, p.t
    dx = abs(q.x - p.x)
    # G(r) ~ e^(-2 pi r): integrate until both arguments pass ~40/(2 pi)
    nu_max = 40.0 / (2.0 * math.pi * min(t, s))

    def integrand(nu):
        nu = np.atleast_1d(nu)
        vals = [
            g_sigma(sigma, t * v, spec) * g_sigma(sigma, s * v, spec)
            * math.cos(2.0 * math.pi * v * dx)
            for v in nu
        ]
        return np.asarray(vals)

    # relax the tolerance: every integrand sample is itself a quadrature
    outer = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-12, max_subdivisions=400)
    return 2.0 * c * c * integrate_adaptive(integrand, 0.0, nu_max, outer)


def functional_gs_oracle(family, params, grid):
    """Literal Gram-Schmidt of the sampled normalized kernels.

    Returns (samples of the orthonormal system as rows, triangular
    coefficient matrix A with A[i, j] = <K~_{q_j}, E_i>) under the grid
    inner product.  Certifies the Gram-entry-only recursion.
    """
    ctx = GramContext(family)
    z = grid.nodes()
    w = np.full(z.size, grid.spacing)
    w[0] = w[-1] = 0.5 * grid.spacing  # trapezoid weights

    kmat = np.empty((len(params), z.size))
    for j, q in enumerate(params):
        kmat[j] = kernel_slice(family, q.t, q.x - z) / math.sqrt(norm_sq(ctx, q))

    n = len(params)
    a = np.zeros((n, n))
    basis = np.zeros((n, z.size))
    for j in range(n):
        v = kmat[j].copy()
        for i in range(j):
            a[i, j] = float(np.sum(w * basis[i] * v))
            v -= a[i, j] * basis[i]
        nrm = math.sqrt(float(np.sum(w * v * v)))
        if nrm < 1e-8:
            raise np.linalg.LinAlgError(
                f"sampled kernels are rank deficient at column {j}"
            )
        a[j, j] = nrm
        basis[j] = v / nrm
    return basis, a


def exhaustive_argmax_oracle(state, t_values, x_values):
    """Brute-force argmax of the pre-orthogonalized objective on a dense
    grid; ties break lexicographically in (t, x)."""
    best = None
    for t in t_values:
        for x in x_values:
            q = HalfSpacePoint(float(t), float(x))
            try:
                obj = preortho_objective(state, q)
            except DegenerateCandidateError:
                continue
            key = (-obj, q.t, q.x)
            if best is None or key < best[0]:
                best = (key, q)
    if best is None:
        raise ValueError("all dense-grid candidates degenerate")
    return best[1]
