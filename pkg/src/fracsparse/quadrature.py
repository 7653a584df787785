"""Adaptive one-dimensional quadrature.

Three entry points:

* :func:`integrate_adaptive` -- finite interval, Gauss-Legendre panels inside
  an adaptive bisection driver.
* :func:`integrate_halfline_decaying` -- integrals over [0, inf) of integrands
  dominated by a decreasing, integrable envelope; the half-line is truncated
  where the envelope tail mass drops below a relative threshold.
* :func:`integrate_oscillatory_cosine` -- integrals of envelope(r)*cos(w*r)
  over [0, inf), split at half-period boundaries so every panel sees at most
  one sign change of the cosine.

Integrands must accept numpy arrays (they are evaluated on whole node blocks).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureError",
    "ConvergenceError",
    "TruncationError",
    "integrate_adaptive",
    "integrate_halfline_decaying",
    "integrate_oscillatory_cosine",
]

_GL_ORDER = 21
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)

# hard cap on the truncation radius search for improper integrals
_MAX_TAIL_DOUBLINGS = 200


class QuadratureError(Exception):
    """Base class for quadrature failures."""


class ConvergenceError(QuadratureError):
    """Subdivision budget exhausted before reaching the requested tolerance.

    Carries the best available estimate and its estimated error.
    """

    def __init__(self, message, estimate, error_estimate):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class TruncationError(QuadratureError):
    """No finite truncation radius meets the tail-mass requirement."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances shared by all quadrature routines.

    Defaults are several digits tighter than the downstream targets because
    Gram-Schmidt amplifies errors in the Gram entries built from these
    integrals.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 4000
    tail_tol: float = 1e-12

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be nonnegative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not 0 < self.tail_tol < 1:
            raise ValueError("tail_tol must lie in (0, 1)")


def _panel(f, a, b):
    """Gauss-Legendre estimate of the integral of f over [a, b]."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vals = np.asarray(f(mid + half * _GL_NODES), dtype=float)
    return half * float(_GL_WEIGHTS @ vals)


def integrate_adaptive(f, a, b, spec=QuadratureSpec()):
    """Integrate ``f`` over [a, b] to max(abs_tol, rel_tol*|I|).

    Error estimation compares each panel against its bisection; the worst
    panel is refined first.  Raises :class:`ConvergenceError` when the
    subdivision budget runs out.
    """
    if not a <= b:
        raise ValueError("integration interval requires a <= b")
    if a == b:
        return 0.0

    whole = _panel(f, a, b)
    mid = 0.5 * (a + b)
    left = _panel(f, a, mid)
    right = _panel(f, mid, b)
    # heap entries: (-error, counter, a, b, coarse, fine_left, fine_right)
    heap = [
        (-abs(whole - (left + right)), 0, a, b, whole, left, right),
    ]
    counter = 1
    total = left + right
    total_err = abs(whole - (left + right))

    for _ in range(spec.max_subdivisions):
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= tol:
            return total
        neg_err, _, pa, pb, coarse, fl, fr = heapq.heappop(heap)
        total_err -= -neg_err
        pm = 0.5 * (pa + pb)
        for qa, qb, est in ((pa, pm, fl), (pm, pb, fr)):
            qm = 0.5 * (qa + qb)
            l = _panel(f, qa, qm)
            r = _panel(f, qm, qb)
            err = abs(est - (l + r))
            total += (l + r) - est
            total_err += err
            heapq.heappush(heap, (-err, counter, qa, qb, est, l, r))
            counter += 1

    tol = max(spec.abs_tol, spec.rel_tol * abs(total))
    if total_err <= tol:
        return total
    raise ConvergenceError(
        f"adaptive quadrature on [{a}, {b}] did not reach tolerance "
        f"(error estimate {total_err:.3e}, tolerance {tol:.3e})",
        estimate=total,
        error_estimate=total_err,
    )


def _envelope_tail_mass(envelope, r, spec):
    """Numerical upper bound on the envelope integral over [r, inf).

    Dyadic panels [r, 2r], [2r, 4r], ... are summed until the increments are
    negligible; the envelope is assumed decreasing and integrable.
    """
    if r <= 0:
        r = 1e-3
    mass = 0.0
    lo = r
    for _ in range(_MAX_TAIL_DOUBLINGS):
        hi = 2.0 * lo
        piece = _panel(envelope, lo, hi)
        mass += piece
        if piece <= 1e-4 * mass + 1e-300:
            return mass
        lo = hi
    raise TruncationError(
        f"envelope tail mass beyond {r} did not converge within "
        f"{_MAX_TAIL_DOUBLINGS} dyadic panels"
    )


def _truncation_radius(envelope, scale, spec, r0=1.0):
    """Smallest dyadic radius R with envelope tail mass <= tail_tol*scale."""
    floor = spec.tail_tol * max(abs(scale), spec.abs_tol)
    r = r0
    for _ in range(_MAX_TAIL_DOUBLINGS):
        if _envelope_tail_mass(envelope, r, spec) <= floor:
            return r
        r *= 2.0
    raise TruncationError(
        f"no truncation radius up to {r} meets the tail tolerance"
    )


def integrate_halfline_decaying(f, envelope_bound, spec=QuadratureSpec()):
    """Integrate ``f`` over [0, inf) given a decreasing integrable envelope.

    Requires |f(u)| <= envelope_bound(u) for u >= 0.  The half-line is
    truncated at R chosen so the envelope tail mass beyond R is below
    tail_tol times the running estimate.
    """
    # first pass to get the magnitude scale
    rough = integrate_adaptive(f, 0.0, 1.0, spec) + _envelope_tail_mass(
        envelope_bound, 1.0, spec
    )
    radius = _truncation_radius(envelope_bound, rough, spec)
    return integrate_adaptive(f, 0.0, radius, spec)


def _averaged_alternating_tail(terms):
    """Accelerated sum of an eventually alternating, decaying sequence.

    Repeated averaging of the partial sums (Euler-van Wijngaarden); for
    smoothly decaying half-period panel integrals the error drops roughly
    like 2^(-len(terms)).
    """
    s = np.cumsum(terms)
    while s.size > 1:
        s = 0.5 * (s[:-1] + s[1:])
    return float(s[0])


def integrate_oscillatory_cosine(envelope, frequency, spec=QuadratureSpec()):
    """Integrate envelope(r)*cos(frequency*r) over [0, inf).

    The envelope must be positive, decreasing to 0 and integrable.  The range
    is split at the cosine's half-period boundaries k*pi/frequency so the
    panel integrals alternate in sign; panels are accumulated with
    compensated summation.  A small frequency (fewer than two half-periods
    within the envelope's truncation radius) degenerates to a single adaptive
    pass.  Envelopes too heavy-tailed to truncate panel by panel (e.g.
    polynomial decay) are finished with alternating-series acceleration on
    the remaining panel sums.
    """
    if frequency < 0:
        raise ValueError("frequency must be nonnegative")

    rough = integrate_adaptive(envelope, 0.0, 1.0, spec) + _envelope_tail_mass(
        envelope, 1.0, spec
    )

    if frequency == 0.0:
        radius = _truncation_radius(envelope, rough, spec)
        return integrate_adaptive(envelope, 0.0, radius, spec)

    half_period = math.pi / frequency

    def g(r):
        return envelope(r) * np.cos(frequency * r)

    # remainder of the panel sum after panel k is bounded by one panel:
    # env(k*half_period) * half_period
    cutoff = spec.tail_tol * max(rough, spec.abs_tol)
    probe_edges = half_period * np.arange(1, 4097)
    panel_bounds = np.asarray(envelope(probe_edges), dtype=float) * half_period
    small = np.nonzero(panel_bounds <= cutoff)[0]

    if small.size and small[0] < 2:
        # fewer than two half-periods matter: one adaptive pass
        radius = max(probe_edges[small[0]], half_period)
        return integrate_adaptive(g, 0.0, radius, spec)

    panel_tol = max(spec.abs_tol, 1e-3 * spec.rel_tol * rough)
    panel_spec = QuadratureSpec(
        rel_tol=spec.rel_tol,
        abs_tol=panel_tol,
        max_subdivisions=spec.max_subdivisions,
        tail_tol=spec.tail_tol,
    )

    def panel(k):
        return integrate_adaptive(
            g, k * half_period, (k + 1) * half_period, panel_spec
        )

    if small.size and small[0] <= 512:
        n_direct = int(small[0]) + 1
        return math.fsum(panel(k) for k in range(n_direct))

    # heavy tail: sum a fixed head, accelerate the alternating remainder
    n_head, n_accel = 64, 48
    head = math.fsum(panel(k) for k in range(n_head))
    tail_terms = [panel(k) for k in range(n_head, n_head + n_accel)]
    return head + _averaged_alternating_tail(tail_terms)
