"""Builtin boundary/initial data for the two reference experiments."""

from __future__ import annotations

import numpy as np

from .greedy import SearchConfig
from .rkhs import DataFunction

__all__ = ["example1", "example2", "example1_search", "example2_search"]


def example1_values(x):
    """Three superposed Lorentzian bumps (heat-equation experiment)."""
    x = np.asarray(x, dtype=float)
    return (
        0.5 / (0.25 + (0.5 - x) ** 2)
        + 2.0 * np.pi / (1.0 + (0.5 + x) ** 2)
        + 0.8 / (0.64 + (1.0 + x) ** 2)
    )


def example2_values(x):
    """Five Gaussian bumps modulated by a cosine (extension-problem
    experiment)."""
    x = np.asarray(x, dtype=float)
    a = np.array([0.5, 3.1, 2.4, 0.2, 1.6])
    b = np.array([1.0, 0.6, -0.04, 2.3, -2.0])
    bumps = a[:, None] * np.exp(-((b[:, None] - x[None, :]) ** 2) / a[:, None])
    return np.sum(bumps, axis=0) * np.cos(x)


def example1(window=800.0):
    # Lorentzian tails: the L2 mass outside [-L, L] falls off like L^-3, so
    # a wide window is needed before the tail is negligible against the
    # decomposition's error floor
    return DataFunction(example1_values, window=window)


def example2(window=12.0):
    return DataFunction(example2_values, window=window)


def example1_search():
    return SearchConfig(t_range=(0.02, 5.0), x_range=(-8.0, 8.0), n_t=40, n_x=161)


def example2_search():
    # wider scale range and denser grid than example 1: the oscillatory
    # datum is harder for the heavy-tailed Poisson dictionary and benefits
    # from scales well outside the bumps' widths
    return SearchConfig(
        t_range=(0.005, 8.0), x_range=(-6.0, 6.0), n_t=50, n_x=201, refine_rounds=9
    )
