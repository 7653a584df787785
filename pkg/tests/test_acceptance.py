"""Acceptance gate: the ten primary criteria, one printed pass/fail line each.

The two reference experiments are decomposed once in module-scoped fixtures
and shared by every criterion that inspects them.
"""

import math
import sys

import numpy as np
import pytest

from fracsparse.datasets import (
    example1,
    example1_search,
    example2,
    example2_search,
)
from fracsparse.greedy import DecompositionState, decompose, gram_schmidt_update, select_next
from fracsparse.kernels import (
    HalfSpacePoint,
    KernelFamily,
    heat_kernel,
    poisson_normalizer,
)
from fracsparse.oracles import (
    OracleGrid,
    convolution_gram_oracle,
    exhaustive_argmax_oracle,
    plancherel_gram_oracle,
)
from fracsparse.quadrature import QuadratureSpec
from fracsparse.rkhs import GramContext, gram, norm_sq

SPEC = QuadratureSpec()

# reference error bounds reported for the source experiments (at unstated
# kernel orders); recorded here as context for criterion 6
REFERENCE_ERROR_EX1 = 1.1668e-4
REFERENCE_ERROR_EX2 = 1.3486e-4


def _report(num, name, ok, detail):
    line = f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    sys.stderr.write(line + "\n")
    assert ok, line


class Experiment:
    def __init__(self, f, ctx, cfg, rep):
        self.f = f
        self.ctx = ctx
        self.cfg = cfg
        self.rep = rep


@pytest.fixture(scope="module")
def ex1():
    f = example1()
    ctx = GramContext(KernelFamily.heat(0.5))
    cfg = example1_search()
    rep = decompose(f, ctx, cfg, max_terms=14)
    return Experiment(f, ctx, cfg, rep)


@pytest.fixture(scope="module")
def ex2():
    f = example2()
    ctx = GramContext(KernelFamily.poisson(1.0))
    cfg = example2_search()
    rep = decompose(f, ctx, cfg, max_terms=15)
    return Experiment(f, ctx, cfg, rep)


def test_criterion_1_classical_closed_forms():
    worst = 0.0
    xs = np.linspace(-10.0, 10.0, 41)
    for t in (0.1, 1.0, 10.0):
        for x in xs:
            ref = math.exp(-x * x / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
            got = heat_kernel(1.0, t, float(x), SPEC, method="quadrature")
            worst = max(worst, abs(got - ref) / ref)
            ref = t / (math.pi * (t * t + x * x))
            got = heat_kernel(0.5, t, float(x), SPEC, method="quadrature")
            worst = max(worst, abs(got - ref) / ref)
    _report(
        1, "classical-case kernel closed forms", worst <= 1e-9,
        f"worst relative error {worst:.3e} (tolerance 1e-9)",
    )


def test_criterion_2_semigroup_identities():
    grid = OracleGrid(spacing=10.0, extent=3000.0)
    points = [HalfSpacePoint(0.5, -1.0), HalfSpacePoint(1.0, 0.0), HalfSpacePoint(2.0, 1.5)]
    worst_heat = 0.0
    for alpha in (0.3, 0.5, 0.8, 1.0):
        ctx = GramContext(KernelFamily.heat(alpha))
        for q in points:
            for p in points:
                ref = convolution_gram_oracle(alpha, q, p, grid)
                got = gram(ctx, q, p)
                worst_heat = max(worst_heat, abs(got - ref) / abs(ref))

    ctx = GramContext(KernelFamily.poisson(1.0))
    c = poisson_normalizer(1.0)
    worst_poisson = 0.0
    for q in points:
        for p in points:
            ts, dx = q.t + p.t, q.x - p.x
            ref = c * ts / (ts * ts + dx * dx)
            got = gram(ctx, q, p)
            worst_poisson = max(worst_poisson, abs(got - ref) / abs(ref))

    ok = worst_heat <= 1e-6 and worst_poisson <= 1e-8
    _report(
        2, "semigroup identities", ok,
        f"heat vs convolution oracle {worst_heat:.3e} (tol 1e-6), "
        f"poisson sigma=1 closed form {worst_poisson:.3e} (tol 1e-8)",
    )


def _normalized_gram(exp):
    rep = exp.rep
    n = len(rep)
    gt = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            gt[i, j] = gt[j, i] = gram(exp.ctx, rep.params[i], rep.params[j]) / (
                rep.kernel_norms[i] * rep.kernel_norms[j]
            )
    return gt


def test_criterion_3_orthonormal_system(ex1, ex2):
    # The E-Gram is A^-T G~ A^-1.  A can be ill-conditioned (the greedy
    # deliberately accepts near-collinear kernels down to the degeneracy
    # floor), so evaluate in extended precision: the inputs A and G~ are
    # exact data here and the check must not be polluted by evaluation
    # roundoff in the inversion itself.
    import mpmath as mp

    worst_identity = 0.0
    worst_unit = 0.0
    worst_a11 = 0.0
    triangular = True
    with mp.workdps(60):
        for exp in (ex1, ex2):
            a = exp.rep.a_matrix
            gt = _normalized_gram(exp)
            n = len(a)
            a_mp = mp.matrix(a.tolist())
            gt_mp = mp.matrix(gt.tolist())
            a_inv = a_mp**-1
            gram_e = a_inv.T * gt_mp * a_inv
            dev = max(
                abs(gram_e[i, j] - (1 if i == j else 0))
                for i in range(n)
                for j in range(n)
            )
            worst_identity = max(worst_identity, float(dev))
            triangular = triangular and np.array_equal(a, np.triu(a))
            worst_a11 = max(worst_a11, abs(a[0, 0] - 1.0))
            worst_unit = max(
                worst_unit, float(np.max(np.abs(np.sqrt(np.sum(a * a, axis=0)) - 1.0)))
            )
    ok = worst_identity <= 1e-8 and triangular and worst_a11 <= 1e-10 and worst_unit <= 1e-10
    _report(
        3, "orthonormal system", ok,
        f"E-Gram deviation from identity {worst_identity:.3e} (tol 1e-8), "
        f"upper-triangular {triangular}, |A11-1| {worst_a11:.1e}, "
        f"unit-column deviation {worst_unit:.3e} (tol 1e-10)",
    )


def test_criterion_4_parseval(ex1, ex2):
    worst = 0.0
    for exp in (ex1, ex2):
        nsq = exp.f.norm_sq
        for k in range(len(exp.rep)):
            captured = float(np.sum(exp.rep.ortho_coeffs[: k + 1] ** 2))
            total = captured + exp.rep.residual_norms[k] ** 2
            worst = max(worst, abs(total - nsq) / nsq)
    _report(
        4, "Parseval isometry per step", worst <= 1e-7,
        f"worst relative defect {worst:.3e} (tolerance 1e-7)",
    )


def test_criterion_5_convergence_bound(ex1, ex2):
    ok = True
    worst_margin = np.inf
    for exp in (ex1, ex2):
        for k in range(len(exp.rep)):
            bound = exp.rep.data_norm / math.sqrt(k + 1)
            ok = ok and exp.rep.residual_norms[k] <= bound
            worst_margin = min(worst_margin, bound - exp.rep.residual_norms[k])
    _report(
        5, "O(1/sqrt(N)) convergence bound", ok,
        f"residuals below ||f||/sqrt(N) at every step (smallest margin {worst_margin:.3e})",
    )


def test_criterion_6_experiment_reproduction(ex1, ex2):
    details = []
    ok = True
    for label, exp, reference in (
        ("experiment 1 (heat, alpha=0.5, N=14)", ex1, REFERENCE_ERROR_EX1),
        ("experiment 2 (poisson, sigma=1, N=15)", ex2, REFERENCE_ERROR_EX2),
    ):
        rel = exp.rep.residual_norms / exp.rep.data_norm
        decreasing = bool(np.all(np.diff(rel) < 0.0))
        final = float(rel[-1])
        passed = final <= 5e-3 and decreasing
        ok = ok and passed
        tag = "paper-consistent" if final <= 1e-3 else "property-form"
        details.append(
            f"{label}: final {final:.4e} (tol 5e-3, reference target {reference:.4e}, "
            f"{tag}), strictly decreasing {decreasing}"
        )
    _report(6, "experiment reproduction", ok, "; ".join(details))


def test_criterion_7_greedy_certification(ex1):
    cfg = ex1.cfg
    t_dense = np.geomspace(cfg.t_range[0], cfg.t_range[1], 200)
    x_dense = np.linspace(cfg.x_range[0], cfg.x_range[1], 200)
    # one coarse-grid spacing in each axis
    t_tol = math.log(cfg.t_range[1] / cfg.t_range[0]) / (cfg.n_t - 1)
    x_tol = (cfg.x_range[1] - cfg.x_range[0]) / (cfg.n_x - 1)

    state = DecompositionState(ctx=ex1.ctx, f=ex1.f)
    details = []
    ok = True
    for step in (1, 2):
        picked = select_next(state, cfg)
        brute = exhaustive_argmax_oracle(state, t_dense, x_dense)
        dt = abs(math.log(picked.t / brute.t))
        dx = abs(picked.x - brute.x)
        step_ok = dt <= t_tol + 1e-12 and dx <= x_tol + 1e-12
        ok = ok and step_ok
        details.append(
            f"step {step}: |dlog t| {dt:.3e} (tol {t_tol:.3e}), |dx| {dx:.3e} (tol {x_tol:.3e})"
        )
        gram_schmidt_update(state, picked)
    _report(7, "greedy selection matches dense argmax", ok, "; ".join(details))


def _bvc_trend(family):
    ctx = GramContext(family)
    p = HalfSpacePoint(1.0, 0.0)

    def corr(q):
        return abs(gram(ctx, p, q)) / math.sqrt(norm_sq(ctx, q))

    t_vals = [corr(HalfSpacePoint(10.0**-k, 0.0)) for k in range(1, 7)]
    x_vals = [corr(HalfSpacePoint(1.0, float(x))) for x in range(2, 65, 2)]
    dec_t = all(a > b for a, b in zip(t_vals, t_vals[1:]))
    dec_x = all(a > b for a, b in zip(x_vals, x_vals[1:]))
    return dec_t, dec_x


def test_criterion_8_boundary_vanishing_trends():
    details = []
    ok = True
    for family in (
        KernelFamily.heat(0.5),
        KernelFamily.heat(0.8),
        KernelFamily.poisson(0.7),
        KernelFamily.poisson(1.0),
    ):
        dec_t, dec_x = _bvc_trend(family)
        ok = ok and dec_t and dec_x
        details.append(
            f"{family.kind}({family.order:g}): decreasing in t {dec_t}, in |x| {dec_x}"
        )
    _report(8, "boundary-vanishing decay trends", ok, "; ".join(details))


def test_criterion_9_dual_route_poisson_gram():
    rng = np.random.default_rng(42)
    worst = 0.0
    for sigma in (0.7, 1.0, 1.5):
        ctx = GramContext(KernelFamily.poisson(sigma))
        for _ in range(5):
            q = HalfSpacePoint(rng.uniform(0.3, 2.5), rng.uniform(-3.0, 3.0))
            p = HalfSpacePoint(rng.uniform(0.3, 2.5), rng.uniform(-3.0, 3.0))
            ref = plancherel_gram_oracle(sigma, q, p)
            got = gram(ctx, q, p)
            worst = max(worst, abs(got - ref) / abs(ref))
    _report(
        9, "Poisson Gram dual routes agree", worst <= 1e-6,
        f"worst relative gap {worst:.3e} (tolerance 1e-6)",
    )


def test_criterion_10_determinism(tmp_path):
    from fracsparse.cli import main

    out = tmp_path / "run"
    args = [
        "decompose", "--family", "heat", "--alpha", "0.5", "--data", "example1",
        "--window", "800", "--terms", "4", "--t-range", "0.02:5",
        "--x-range=-8:8", "--grid", "20x81", "--refine", "6", "--out", str(out),
    ]
    names = ("params.csv", "a_matrix.csv", "result.json", "approx_curve.csv")
    assert main(args) == 0
    first = {name: (out / name).read_bytes() for name in names}
    for name in names:
        (out / name).unlink()
    assert main(args) == 0
    same = all(first[name] == (out / name).read_bytes() for name in names)
    _report(
        10, "deterministic outputs", same,
        "two identical-config decompositions produced byte-identical artifacts",
    )
