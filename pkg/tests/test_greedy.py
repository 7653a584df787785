"""Greedy decomposition: selection, triangular bookkeeping, stopping."""

import math

import numpy as np
import pytest
from scipy.linalg import solve_triangular

from fracsparse.greedy import (
    DecompositionState,
    DegenerateCandidateError,
    SearchConfig,
    coefficients_from_orthonormal,
    decompose,
    gram_schmidt_update,
    preortho_objective,
    select_next,
)
from fracsparse.kernels import HalfSpacePoint, KernelFamily
from fracsparse.rkhs import DataFunction, GramContext, kernel_slice, norm_sq

HEAT = KernelFamily.heat(0.5)


def _kernel_datum(family, terms, window=2000.0):
    """Datum equal to sum of coeff * unit-norm kernels."""
    ctx = GramContext(family)
    comps = [(c, q, math.sqrt(norm_sq(ctx, q))) for c, q in terms]

    def values(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, q, nrm in comps:
            out += c * kernel_slice(family, q.t, q.x - x) / nrm
        return out

    return DataFunction(values, window=window), ctx


# a small search whose coarse grid contains (1.0, 1.0) exactly
SMALL_CFG = SearchConfig(
    t_range=(0.5, 2.0), x_range=(-2.0, 2.0), n_t=3, n_x=5, refine_rounds=4
)


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(t_range=(0.0, 1.0))
    with pytest.raises(ValueError):
        SearchConfig(x_range=(2.0, -2.0))
    with pytest.raises(ValueError):
        SearchConfig(n_t=1)
    with pytest.raises(ValueError):
        SearchConfig(refine_shrink=1.0)


def test_single_kernel_recovery():
    f, ctx = _kernel_datum(HEAT, [(3.0, HalfSpacePoint(1.0, 1.0))])
    rep = decompose(f, ctx, SMALL_CFG, max_terms=1)
    q = rep.params[0]
    assert abs(q.t - 1.0) < 1e-9 and abs(q.x - 1.0) < 1e-9
    assert abs(rep.kernel_coeffs[0] - 3.0) < 1e-6
    assert rep.residual_norms[-1] / rep.data_norm < 1e-4
    assert abs(rep.a_matrix[0, 0] - 1.0) < 1e-12


def test_two_kernel_recovery():
    f, ctx = _kernel_datum(
        HEAT, [(2.0, HalfSpacePoint(1.0, 1.0)), (1.0, HalfSpacePoint(0.5, -1.0))]
    )
    rep = decompose(f, ctx, SMALL_CFG, max_terms=6)
    assert rep.residual_norms[-1] / rep.data_norm < 1e-4
    # residual strictly decreasing while meaningful
    drops = np.diff(rep.residual_norms)
    assert np.all(drops <= 1e-12)


def test_a_matrix_structure():
    f, ctx = _kernel_datum(
        HEAT, [(2.0, HalfSpacePoint(1.0, 1.0)), (1.0, HalfSpacePoint(0.5, -1.0))]
    )
    rep = decompose(f, ctx, SMALL_CFG, max_terms=3)
    a = rep.a_matrix
    assert np.allclose(a, np.triu(a))
    assert abs(a[0, 0] - 1.0) < 1e-12
    # unit columns: each normalized kernel has unit norm in the E-basis
    col_norms = np.sqrt(np.sum(a * a, axis=0))
    assert np.max(np.abs(col_norms - 1.0)) < 1e-10


def test_degenerate_reselection_raises():
    f, ctx = _kernel_datum(HEAT, [(1.0, HalfSpacePoint(1.0, 0.0))])
    state = DecompositionState(ctx=ctx, f=f)
    q = HalfSpacePoint(0.7, 0.2)
    gram_schmidt_update(state, q)
    with pytest.raises(DegenerateCandidateError):
        preortho_objective(state, q)
    with pytest.raises(DegenerateCandidateError):
        gram_schmidt_update(state, q)


def test_select_next_deterministic():
    f, ctx = _kernel_datum(
        HEAT, [(1.0, HalfSpacePoint(1.0, 0.5)), (0.5, HalfSpacePoint(0.6, -0.5))]
    )
    state = DecompositionState(ctx=ctx, f=f)
    q1 = select_next(state, SMALL_CFG)
    q2 = select_next(state, SMALL_CFG)
    assert q1 == q2


def test_coefficients_back_substitution():
    rng = np.random.default_rng(5)
    a = np.triu(rng.standard_normal((6, 6)))
    a[np.diag_indices(6)] = rng.uniform(0.5, 2.0, size=6)
    b = rng.standard_normal(6)
    got = coefficients_from_orthonormal(a, b)
    ref = solve_triangular(a, b)
    assert np.max(np.abs(got - ref)) < 1e-10
    a[2, 2] = 1e-12
    with pytest.raises(np.linalg.LinAlgError):
        coefficients_from_orthonormal(a, b)


def test_decompose_requires_stopping_rule():
    f, ctx = _kernel_datum(HEAT, [(1.0, HalfSpacePoint(1.0, 0.0))])
    with pytest.raises(ValueError):
        decompose(f, ctx, SMALL_CFG)


def test_decompose_rel_error_stop():
    f, ctx = _kernel_datum(HEAT, [(2.0, HalfSpacePoint(1.0, 1.0))])
    rep = decompose(f, ctx, SMALL_CFG, rel_error=1e-3, max_terms=5)
    assert len(rep) <= 5
    assert rep.residual_norms[-1] <= 1e-3 * rep.data_norm


def test_parseval_bookkeeping():
    f, ctx = _kernel_datum(
        HEAT, [(2.0, HalfSpacePoint(1.0, 1.0)), (1.0, HalfSpacePoint(0.5, -1.0))]
    )
    rep = decompose(f, ctx, SMALL_CFG, max_terms=3)
    for k in range(len(rep)):
        captured = float(np.sum(rep.ortho_coeffs[: k + 1] ** 2))
        total = captured + rep.residual_norms[k] ** 2
        assert abs(total - rep.data_norm**2) < 1e-7 * rep.data_norm**2
