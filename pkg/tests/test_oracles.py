"""Brute-force oracles agree with the production shortcuts."""

import math

import numpy as np
import pytest

from fracsparse.greedy import DecompositionState, SearchConfig, select_next
from fracsparse.kernels import HalfSpacePoint, KernelFamily
from fracsparse.oracles import (
    OracleGrid,
    convolution_gram_oracle,
    exhaustive_argmax_oracle,
    functional_gs_oracle,
    plancherel_gram_oracle,
)
from fracsparse.rkhs import DataFunction, GramContext, gram, kernel_slice, norm_sq


def test_oracle_grid_validation():
    with pytest.raises(ValueError):
        OracleGrid(spacing=0.0, extent=10.0)
    with pytest.raises(ValueError):
        OracleGrid(spacing=1.0, extent=10.0)  # fewer than 201 nodes
    nodes = OracleGrid(spacing=0.05, extent=10.0).nodes()
    assert nodes.size == 401
    assert nodes[0] == -10.0 and nodes[-1] == 10.0


def test_convolution_oracle_vs_semigroup():
    # heavy |x|^-(1+2 alpha) kernel tails: the product integral needs a wide
    # domain before truncation error clears 1e-8 relative
    grid = OracleGrid(spacing=10.0, extent=3000.0)
    for alpha in (0.5, 1.0):
        ctx = GramContext(KernelFamily.heat(alpha))
        q = HalfSpacePoint(0.5, -1.0)
        p = HalfSpacePoint(1.5, 2.0)
        ref = convolution_gram_oracle(alpha, q, p, grid)
        got = gram(ctx, q, p)
        assert abs(got - ref) < 1e-8 * abs(ref)


def test_plancherel_oracle_vs_spatial():
    ctx = GramContext(KernelFamily.poisson(1.0))
    q = HalfSpacePoint(0.8, 0.0)
    p = HalfSpacePoint(1.2, 1.5)
    ref = plancherel_gram_oracle(1.0, q, p)
    got = gram(ctx, q, p)
    assert abs(got - ref) < 1e-7 * abs(ref)


def test_functional_gs_matches_gram_recursion():
    family = KernelFamily.heat(0.5)
    params = [
        HalfSpacePoint(1.0, 0.0),
        HalfSpacePoint(0.5, 1.0),
        HalfSpacePoint(2.0, -1.5),
    ]
    grid = OracleGrid(spacing=0.01, extent=500.0)
    basis, a_oracle = functional_gs_oracle(family, params, grid)

    # production route: Cholesky of the normalized Gram reproduces A
    ctx = GramContext(family)
    n = len(params)
    gtil = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            gtil[i, j] = gram(ctx, params[i], params[j]) / math.sqrt(
                norm_sq(ctx, params[i]) * norm_sq(ctx, params[j])
            )
    a_prod = np.linalg.cholesky(gtil).T
    assert np.max(np.abs(a_oracle - a_prod)) < 1e-6

    # sampled orthonormality of the oracle basis
    w = np.full(basis.shape[1], grid.spacing)
    w[0] = w[-1] = 0.5 * grid.spacing
    gram_e = (basis * w) @ basis.T
    assert np.max(np.abs(gram_e - np.eye(n))) < 1e-6


def test_exhaustive_argmax_matches_select_next():
    family = KernelFamily.heat(0.5)
    ctx = GramContext(family)
    q_true = HalfSpacePoint(1.0, 0.5)
    nrm = math.sqrt(norm_sq(ctx, q_true))
    f = DataFunction(
        lambda x: 2.0 * kernel_slice(family, q_true.t, q_true.x - x) / nrm,
        window=2000.0,
    )
    cfg = SearchConfig(
        t_range=(0.5, 2.0), x_range=(-1.0, 1.0), n_t=5, n_x=9, refine_rounds=0
    )
    state = DecompositionState(ctx=ctx, f=f)
    picked = select_next(state, cfg)
    brute = exhaustive_argmax_oracle(state, cfg.t_grid(), cfg.x_grid())
    assert picked == brute
