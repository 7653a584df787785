"""Greedy sparse decomposition over a parameterized kernel dictionary.

At each step the candidate kernel is orthonormalized, implicitly, against the
already-selected ones (pre-orthogonalized correlation); the parameter
maximizing the correlation with the current residual is taken.  The search is
a coarse grid (log-spaced scales, uniform centers) followed by local 3x3
stencil refinement.

All bookkeeping lives in Gram-entry space: the upper-triangular change of
basis A (columns expand unit-norm dictionary kernels over the orthonormal
system) is enough to evaluate objectives without any function-space
orthogonalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import HalfSpacePoint, KernelFamily
from .rkhs import DataFunction, GramContext, data_kernel_inner, gram, norm_sq

__all__ = [
    "SearchConfig",
    "SparseRepresentation",
    "DecompositionState",
    "DegenerateCandidateError",
    "DictionaryExhaustedError",
    "preortho_objective",
    "select_next",
    "gram_schmidt_update",
    "decompose",
    "coefficients_from_orthonormal",
]

# relative threshold below which a candidate is numerically in the span of
# the selected kernels
DEGENERACY_FLOOR = 1e-8


class DegenerateCandidateError(Exception):
    """Candidate kernel is numerically in the span of the selected ones."""


class DictionaryExhaustedError(Exception):
    """Every search candidate was degenerate; carries the partial result."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class SearchConfig:
    """Parameter-search policy for the greedy selection."""

    t_range: tuple = (0.02, 5.0)
    x_range: tuple = (-8.0, 8.0)
    n_t: int = 40
    n_x: int = 161
    refine_rounds: int = 6
    refine_shrink: float = 0.5
    degeneracy_floor: float = DEGENERACY_FLOOR

    def __post_init__(self):
        if not 0 < self.t_range[0] < self.t_range[1]:
            raise ValueError("t_range must satisfy 0 < t_min < t_max")
        if not self.x_range[0] < self.x_range[1]:
            raise ValueError("x_range must satisfy x_min < x_max")
        if self.n_t < 2 or self.n_x < 2:
            raise ValueError("grid needs at least 2 nodes per axis")
        if not 0 < self.refine_shrink < 1:
            raise ValueError("refine_shrink must lie in (0, 1)")
        if not self.degeneracy_floor > 0:
            raise ValueError("degeneracy_floor must be positive")

    def t_grid(self):
        return np.geomspace(self.t_range[0], self.t_range[1], self.n_t)

    def x_grid(self):
        return np.linspace(self.x_range[0], self.x_range[1], self.n_x)


@dataclass(frozen=True)
class SparseRepresentation:
    """Result of a decomposition: selected parameters, both coefficient
    systems, the triangular change of basis and the residual trace."""

    family: KernelFamily
    params: tuple  # HalfSpacePoint, ordered
    ortho_coeffs: np.ndarray  # <f, E_k>
    kernel_coeffs: np.ndarray  # c_k with f_N = sum c_k * unit-norm kernel
    a_matrix: np.ndarray  # upper triangular, A[j, k] = <K~_{q_k}, E_j>
    residual_norms: np.ndarray  # ||f - f_k|| after each step
    kernel_norms: np.ndarray  # ||K_{q_k}||
    data_norm: float  # ||f||

    def __len__(self):
        return len(self.params)


@dataclass
class DecompositionState:
    """Mutable loop state; snapshots of the triangular system per step."""

    ctx: GramContext
    f: DataFunction
    points: list = field(default_factory=list)
    kernel_norms: list = field(default_factory=list)
    a_cols: list = field(default_factory=list)  # column k: A[0:k+1, k]
    ortho_coeffs: list = field(default_factory=list)
    residual_sq: float = 0.0

    def __post_init__(self):
        self.residual_sq = self.f.norm_sq

    @property
    def size(self):
        return len(self.points)

    def a_matrix(self):
        n = self.size
        a = np.zeros((n, n))
        for k, col in enumerate(self.a_cols):
            a[: k + 1, k] = col
        return a


def _normalized_cross(state, q, q_norm):
    """<K~_q, E_j> for all selected j, from Gram entries and the stored
    triangular columns."""
    out = np.empty(state.size)
    for j, (p, p_norm) in enumerate(zip(state.points, state.kernel_norms)):
        g = gram(state.ctx, q, p) / (q_norm * p_norm)
        col = state.a_cols[j]
        out[j] = (g - col[:j] @ out[:j]) / col[j]
    return out


def preortho_objective(state, q):
    """Pre-orthogonalized correlation of the residual with the candidate q.

    Equals |<g, K~_q> - sum_j <f, E_j><K~_q, E_j>| / sqrt(1 - sum_j
    <K~_q, E_j>^2); reduces to the plain normalized correlation at step 1.
    Raises :class:`DegenerateCandidateError` when the denominator collapses.
    """
    q_norm = math.sqrt(norm_sq(state.ctx, q))
    cross = _normalized_cross(state, q, q_norm)
    den_sq = 1.0 - float(cross @ cross)
    if den_sq < DEGENERACY_FLOOR:
        raise DegenerateCandidateError(
            f"candidate {q} is numerically in the selected span"
        )
    num = data_kernel_inner(state.ctx, state.f, q) / q_norm
    if state.size:
        num -= np.asarray(state.ortho_coeffs) @ cross
    return abs(num) / math.sqrt(den_sq)


def _objective_or_none(state, q):
    try:
        return preortho_objective(state, q)
    except DegenerateCandidateError:
        return None


def _better(candidate, best):
    """Strict improvement with lexicographic (t, x) tie-breaking."""
    obj_c, q_c = candidate
    obj_b, q_b = best
    if obj_c > obj_b * (1.0 + 1e-12):
        return True
    if obj_c < obj_b * (1.0 - 1e-12):
        return False
    return (q_c.t, q_c.x) < (q_b.t, q_b.x)


def select_next(state, cfg):
    """Best non-degenerate parameter: coarse grid scan plus local refinement.

    Deterministic: grid order is fixed and ties break toward smaller t, then
    smaller x.  Raises :class:`DictionaryExhaustedError` if every candidate
    is degenerate.
    """
    best = None
    for t in cfg.t_grid():
        for x in cfg.x_grid():
            q = HalfSpacePoint(float(t), float(x))
            obj = _objective_or_none(state, q)
            if obj is None:
                continue
            if best is None or _better((obj, q), best):
                best = (obj, q)
    if best is None:
        raise DictionaryExhaustedError("all coarse-grid candidates degenerate")

    t_ratio = (cfg.t_range[1] / cfg.t_range[0]) ** (1.0 / (cfg.n_t - 1))
    x_step = (cfg.x_range[1] - cfg.x_range[0]) / (cfg.n_x - 1)
    log_step = math.log(t_ratio)
    for _ in range(cfg.refine_rounds):
        log_step *= cfg.refine_shrink
        x_step *= cfg.refine_shrink
        incumbent = best[1]
        for dt in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dt == 0 and dx == 0:
                    continue
                t = incumbent.t * math.exp(dt * log_step)
                x = incumbent.x + dx * x_step
                q = HalfSpacePoint(t, x)
                obj = _objective_or_none(state, q)
                if obj is not None and _better((obj, q), best):
                    best = (obj, q)
    return best[1]


def gram_schmidt_update(state, q):
    """Append q to the decomposition: extend the triangular system, the
    orthonormal coefficients and the residual bookkeeping."""
    q_norm = math.sqrt(norm_sq(state.ctx, q))
    cross = _normalized_cross(state, q, q_norm)
    diag_sq = 1.0 - float(cross @ cross)
    if diag_sq < DEGENERACY_FLOOR:
        raise DegenerateCandidateError(
            f"selected parameter {q} is numerically in the span"
        )
    diag = math.sqrt(diag_sq)
    f_inner = data_kernel_inner(state.ctx, state.f, q) / q_norm
    if state.size:
        f_inner = (f_inner - np.asarray(state.ortho_coeffs) @ cross) / diag
    else:
        f_inner = f_inner / diag

    state.points.append(q)
    state.kernel_norms.append(q_norm)
    state.a_cols.append(np.concatenate([cross, [diag]]))
    state.ortho_coeffs.append(f_inner)
    state.residual_sq = max(state.residual_sq - f_inner * f_inner, 0.0)
    return state


def coefficients_from_orthonormal(a_matrix, ortho_coeffs):
    """Back-substitute A c = <f, E> for the kernel coefficients c."""
    a = np.asarray(a_matrix, dtype=float)
    b = np.asarray(ortho_coeffs, dtype=float)
    n = a.shape[0]
    if np.any(np.abs(np.diag(a)) < DEGENERACY_FLOOR):
        raise np.linalg.LinAlgError("triangular system is numerically singular")
    c = np.zeros(n)
    for k in range(n - 1, -1, -1):
        c[k] = (b[k] - a[k, k + 1 :] @ c[k + 1 :]) / a[k, k]
    return c


def _finish(state):
    a = state.a_matrix()
    ortho = np.asarray(state.ortho_coeffs)
    coeffs = coefficients_from_orthonormal(a, ortho) if state.size else np.zeros(0)
    residual = np.sqrt(
        np.maximum(state.f.norm_sq - np.cumsum(ortho**2), 0.0)
    )
    return SparseRepresentation(
        family=state.ctx.family,
        params=tuple(state.points),
        ortho_coeffs=ortho,
        kernel_coeffs=coeffs,
        a_matrix=a,
        residual_norms=residual,
        kernel_norms=np.asarray(state.kernel_norms),
        data_norm=state.f.norm,
    )


def decompose(f, ctx, cfg=SearchConfig(), max_terms=None, rel_error=None):
    """Run the greedy loop until ``max_terms`` terms or the relative
    residual drops below ``rel_error``.

    Returns a :class:`SparseRepresentation`.  If the dictionary is exhausted
    early, raises :class:`DictionaryExhaustedError` with the partial result
    attached.
    """
    if max_terms is None and rel_error is None:
        raise ValueError("need a stopping rule: max_terms and/or rel_error")
    if f.norm_sq <= 0:
        raise ValueError("datum has zero norm")

    state = DecompositionState(ctx=ctx, f=f)
    while True:
        if max_terms is not None and state.size >= max_terms:
            break
        if rel_error is not None and math.sqrt(state.residual_sq) <= rel_error * f.norm:
            break
        try:
            q = select_next(state, cfg)
            gram_schmidt_update(state, q)
        except (DictionaryExhaustedError, DegenerateCandidateError) as exc:
            raise DictionaryExhaustedError(
                f"dictionary exhausted after {state.size} terms", partial=_finish(state)
            ) from exc
    return _finish(state)
