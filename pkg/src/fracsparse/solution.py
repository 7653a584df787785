"""Lift a sparse representation of boundary/initial data to the solution
field on the open upper half-plane.

Heat family: each expansion term rides the semigroup, so u at (t, x) is a sum
of kernel evaluations at combined scale t + t_k.  Poisson family: no
semigroup, so each term needs the Gram entry against the evaluation point
(cached by the underlying context).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import HalfSpacePoint
from .rkhs import GramContext, gram, norm_sq
from .greedy import SparseRepresentation
from .kernels import heat_kernel_batch

__all__ = ["SolutionField", "evaluate_solution", "evaluate_grid", "isometry_report"]


@dataclass(frozen=True)
class SolutionField:
    rep: SparseRepresentation
    ctx: GramContext

    def __post_init__(self):
        if self.rep.family != self.ctx.family:
            raise ValueError("representation and context families differ")


def evaluate_solution(sol, p):
    """Solution value u(p) at a half-plane point p with p.t > 0.

    Evaluation at the boundary t = 0 is rejected; boundary values belong to
    the representation itself.
    """
    if not p.t > 0:
        raise ValueError("solution evaluation requires t > 0")
    rep, ctx = sol.rep, sol.ctx
    total = 0.0
    if rep.family.kind == "heat":
        alpha = rep.family.order
        for c, q, kn in zip(rep.kernel_coeffs, rep.params, rep.kernel_norms):
            total += c * float(heat_kernel_batch(alpha, p.t + q.t, q.x - p.x)) / kn
    else:
        for c, q, kn in zip(rep.kernel_coeffs, rep.params, rep.kernel_norms):
            total += c * gram(ctx, q, p) / kn
    return total


def evaluate_grid(sol, t_values, x_values):
    """Row-major matrix u[t_i][x_j]; identical to pointwise calls."""
    t_values = np.asarray(t_values, dtype=float)
    x_values = np.asarray(x_values, dtype=float)
    if np.any(t_values <= 0):
        raise ValueError("all grid times must be positive")
    rep, ctx = sol.rep, sol.ctx
    out = np.zeros((t_values.size, x_values.size))
    if rep.family.kind == "heat":
        alpha = rep.family.order
        for i, t in enumerate(t_values):
            for c, q, kn in zip(rep.kernel_coeffs, rep.params, rep.kernel_norms):
                out[i] += c * heat_kernel_batch(alpha, t + q.t, q.x - x_values) / kn
    else:
        for i, t in enumerate(t_values):
            for j, x in enumerate(x_values):
                out[i, j] = evaluate_solution(sol, HalfSpacePoint(float(t), float(x)))
    return out


def isometry_report(sol, f):
    """Norm bookkeeping across the boundary isometry.

    Returns a dict with the datum's L2 norm, the solution's kernel-space
    norm sqrt(c' G~ c) over the normalized-kernel Gram G~, and the residual
    sqrt(||f||^2 - ||u||^2) clipped at zero.
    """
    rep, ctx = sol.rep, sol.ctx
    n = len(rep)
    gtil = np.empty((n, n))
    for i, qi in enumerate(rep.params):
        for j, qj in enumerate(rep.params):
            if j < i:
                gtil[i, j] = gtil[j, i]
            else:
                gtil[i, j] = gram(ctx, qi, qj) / (rep.kernel_norms[i] * rep.kernel_norms[j])
    c = rep.kernel_coeffs
    hk_sq = float(c @ gtil @ c) if n else 0.0
    radicand = f.norm_sq - hk_sq
    if radicand < -1e-8 * f.norm_sq:
        raise ArithmeticError(
            f"kernel-space norm exceeds the data norm ({hk_sq} > {f.norm_sq})"
        )
    return {
        "l2_norm_f": f.norm,
        "hk_norm_u": math.sqrt(max(hk_sq, 0.0)),
        "residual": math.sqrt(max(radicand, 0.0)),
    }
