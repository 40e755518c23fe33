"""Closed-form torsion values and the global rigidity bounds.

For the interval [0, L] with a Dirichlet end at 0 and a Neumann end at L::

    T_alpha = 8 * 2**(2a) * L**(2a+1) / pi**(2+2a) * (1 - 2**-(2+2a)) * zeta(2+2a)

and for the equilateral flower with N petals of length L (all vertices
Dirichlet)::

    T_alpha = N * 8 * L**(1+2a) / pi**(2(1+a)) * (1 - 2**-(2(1+a))) * zeta(2(1+a))

Both reduce to the classical values L**3/3 and N*L**3/12 at alpha = 1.
Among graphs of fixed total length the interval value (taken at L = total
length) is an upper bound for the rigidity and the flower value (taken with
one petal per edge) is a lower bound, which is what ``extremal_bounds``
evaluates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import MetricGraph, total_length


def fpow(base, exponent):
    """Fractional power via exp/log, used for every alpha-dependent power so
    quantities like L**(2*alpha+1) are computed identically across modules."""
    b = np.asarray(base, dtype=float)
    if np.any(b <= 0.0):
        raise ValueError("fpow requires a positive base")
    out = np.exp(exponent * np.log(b))
    if np.ndim(base) == 0:
        return float(out)
    return out


def zeta(s: float, tol: float = 1e-12) -> float:
    """Riemann zeta for real s > 1 by direct summation with an
    Euler-Maclaurin tail.

    The head is summed to N - 1; the tail from N is the integral
    N**(1-s)/(s-1) plus the N**(-s)/2 midpoint term and two Bernoulli
    corrections. N is chosen so the first omitted correction is below
    tol/2, which keeps N in the tens even at tol = 1e-12.
    """
    if s <= 1.0:
        raise ValueError("zeta(s) requires s > 1")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    remainder_coeff = 2.0 * s * (s + 1) * (s + 2) * (s + 3) * (s + 4) / 30240.0
    n_cut = max(16, int(math.ceil((remainder_coeff / tol) ** (1.0 / (s + 5)))))
    n = np.arange(1.0, n_cut)
    head = float(np.sum(n ** (-s)))
    tail = (
        n_cut ** (1.0 - s) / (s - 1.0)
        + 0.5 * n_cut ** (-s)
        + s * n_cut ** (-s - 1.0) / 12.0
        - s * (s + 1) * (s + 2) * n_cut ** (-s - 3.0) / 720.0
    )
    return head + tail


def odd_zeta(s: float, tol: float = 1e-12) -> float:
    """Sum of (2n-1)**-s over n >= 1, via the identity (1 - 2**-s) * zeta(s)."""
    if s <= 1.0:
        raise ValueError("odd_zeta(s) requires s > 1")
    return (1.0 - 2.0 ** (-s)) * zeta(s, tol)


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must be in (0, 1], got {alpha!r}")


def interval_rigidity_dn(length: float, alpha: float) -> float:
    """Rigidity of the interval [0, length], Dirichlet at 0, Neumann at length."""
    if length <= 0:
        raise ValueError("length must be positive")
    _check_alpha(alpha)
    s = 2.0 + 2.0 * alpha
    return (
        8.0
        * fpow(2.0, 2.0 * alpha)
        * fpow(length, 2.0 * alpha + 1.0)
        / fpow(math.pi, s)
        * odd_zeta(s)
    )


def interval_torsion_dn(length: float, alpha: float, x: float, n_terms: int) -> float:
    """Partial sine series of the interval torsion function at position x.

    u_alpha(x) = sum over n of
    4*(2L)**(2a) / ((2n-1)**(1+2a) * pi**(1+2a)) * sin((2n-1)*pi*x/(2L)).
    """
    if length <= 0:
        raise ValueError("length must be positive")
    _check_alpha(alpha)
    if not (0.0 <= x <= length):
        raise ValueError(f"x={x!r} is outside [0, {length!r}]")
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    n = np.arange(1, n_terms + 1)
    odd = 2.0 * n - 1.0
    amp = 4.0 * fpow(2.0 * length, 2.0 * alpha) / (fpow(odd, 1.0 + 2.0 * alpha) * fpow(math.pi, 1.0 + 2.0 * alpha))
    return float(np.sum(amp * np.sin(odd * math.pi * x / (2.0 * length))))


def flower_rigidity(n_petals: int, length: float, alpha: float) -> float:
    """Rigidity of the equilateral flower: n_petals loops of the given length
    attached to a single all-Dirichlet vertex."""
    if n_petals < 1:
        raise ValueError("need at least one petal")
    if length <= 0:
        raise ValueError("length must be positive")
    _check_alpha(alpha)
    s = 2.0 * (1.0 + alpha)
    return n_petals * 8.0 * fpow(length, 1.0 + 2.0 * alpha) / fpow(math.pi, s) * odd_zeta(s)


@dataclass(frozen=True)
class BoundsPair:
    """Closed-form sandwich for the rigidity of a graph: flower below,
    interval above, among graphs of the same total length."""

    lower: float
    upper: float
    alpha: float
    total_length: float
    n_edges: int


def extremal_bounds(g: MetricGraph, alpha: float) -> BoundsPair:
    """Lower bound from the equilateral flower with one petal per edge,
    upper bound from the Dirichlet-Neumann interval of the same total length."""
    _check_alpha(alpha)
    length = total_length(g)
    n_edges = len(g.edges)
    return BoundsPair(
        lower=flower_rigidity(n_edges, length / n_edges, alpha),
        upper=interval_rigidity_dn(length, alpha),
        alpha=alpha,
        total_length=length,
        n_edges=n_edges,
    )
