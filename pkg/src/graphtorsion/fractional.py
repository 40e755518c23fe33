"""Spectral calculus on a computed eigenbasis.

Everything here is a sum over the pairs of a SpectralBasis: the torsion
function u_alpha (coefficients mass_n / lambda_n**alpha), the torsional
rigidity T_alpha (sum of mass_n**2 / lambda_n**alpha) with a rigorous
truncation tail from Bessel's inequality, the fractional Sobolev norm, the
Rayleigh-type quotient whose supremum is T_alpha, and the concave functional
J(f) = 2*integral(f) - |f|_alpha**2 maximized by the torsion function.

The tail bound is (|G| - captured_mass) / next_lambda**alpha: the residual
L2 mass of the constant function beyond the scan, divided by the smallest
possible remaining eigenvalue. It is rigorous whenever next_lambda is a
lower bound for the first eigenvalue beyond the scan.

Pointwise truncation errors for u_alpha are a different matter: the
error_estimate attached to a TorsionSample is a heuristic Weyl-model window
sum and is not rigorous, especially for alpha <= 1/2 where vertex traces
degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import fpow
from .graph import GraphPoint, MetricGraph, check_point, total_length
from .solver import SpectralBasis


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must be in (0, 1], got {alpha!r}")


@dataclass(frozen=True, eq=False)
class RigidityResult:
    """Partial-sum rigidity plus a rigorous truncation tail bound."""

    alpha: float
    value: float
    tail_bound: float
    n_terms: int
    next_lambda: float


@dataclass(frozen=True, eq=False)
class SpectralVector:
    """Coefficients of a function against the pairs of a SpectralBasis."""

    coefficients: np.ndarray

    def __len__(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class TorsionSample:
    point: GraphPoint
    value: float
    error_estimate: float


def as_spectral_vector(f) -> SpectralVector:
    if isinstance(f, SpectralVector):
        return f
    return SpectralVector(np.asarray(f, dtype=float))


def _aligned(f, basis: SpectralBasis) -> np.ndarray:
    c = as_spectral_vector(f).coefficients
    if len(c) != basis.n_pairs:
        raise ValueError(
            f"coefficient vector of length {len(c)} does not match basis with "
            f"{basis.n_pairs} pairs"
        )
    return c


def rigidity(basis: SpectralBasis, alpha: float) -> RigidityResult:
    """Torsional rigidity partial sum over the scanned pairs.

    All terms are nonnegative, so the value is a lower estimate of the true
    rigidity and value + tail_bound is an upper estimate.
    """
    _check_alpha(alpha)
    if not basis.pairs:
        raise ValueError("empty spectral basis")
    lam = basis.lambdas
    mass = basis.masses
    value = float(np.sum(mass ** 2 * fpow(lam, -alpha)))
    residual = max(0.0, total_length(basis.graph) - basis.captured_mass)
    if basis.next_lambda > 0.0:
        tail = residual / fpow(basis.next_lambda, alpha)
    else:
        tail = math.inf
    return RigidityResult(
        alpha=alpha,
        value=value,
        tail_bound=float(tail),
        n_terms=basis.n_pairs,
        next_lambda=basis.next_lambda,
    )


def torsion_coefficients(basis: SpectralBasis, alpha: float) -> SpectralVector:
    """Coefficients mass_n / lambda_n**alpha of the truncated torsion function."""
    _check_alpha(alpha)
    return SpectralVector(basis.masses * fpow(basis.lambdas, -alpha))


def _pointwise_error_estimate(basis: SpectralBasis, alpha: float) -> float:
    # Heuristic: sup-norm model C*sqrt(lambda) for eigenfunctions, Weyl model
    # lambda_n ~ (n*pi/|G|)**2 for the omitted modes, one window of tail
    # terms lambda**(1/2 - alpha). Not rigorous; for alpha <= 1/2 treat it
    # as a qualitative indicator only.
    amp = np.sqrt((basis.coeff_tensor ** 2).sum(axis=2)).max(axis=1)
    sup = float((amp / np.sqrt(basis.lambdas)).max())
    length = total_length(basis.graph)
    n = basis.n_pairs
    window = np.arange(n + 1, n + 1 + max(64, n))
    lam_model = (window * math.pi / length) ** 2
    return float(sup * math.sqrt(length) * np.sum(fpow(lam_model, 0.5 - alpha)))


def torsion_at(basis: SpectralBasis, alpha: float, x: GraphPoint) -> TorsionSample:
    """Truncated torsion function u_alpha at one point of the graph."""
    _check_alpha(alpha)
    check_point(basis.graph, x)
    if not basis.pairs:
        raise ValueError("empty spectral basis")
    eidx = basis.graph.edge_ids.index(x.edge)
    a = basis.coeff_tensor[:, eidx, 0]
    b = basis.coeff_tensor[:, eidx, 1]
    phi = a * np.cos(basis.ks * x.s) + b * np.sin(basis.ks * x.s)
    weights = basis.masses * fpow(basis.lambdas, -alpha)
    return TorsionSample(
        point=x,
        value=float(weights @ phi),
        error_estimate=_pointwise_error_estimate(basis, alpha),
    )


def h_alpha_norm_sq(f, basis: SpectralBasis, alpha: float) -> float:
    """Squared fractional Sobolev norm: sum of lambda_n**alpha * c_n**2."""
    _check_alpha(alpha)
    c = _aligned(f, basis)
    return float(np.sum(fpow(basis.lambdas, alpha) * c ** 2))


def rayleigh_quotient(f, basis: SpectralBasis, alpha: float) -> float:
    """(integral of f)**2 over the fractional energy of f.

    The supremum over all admissible f is the torsional rigidity, attained
    exactly at scalar multiples of the torsion function; on the truncated
    coefficient space the quotient therefore never exceeds the rigidity.
    """
    _check_alpha(alpha)
    c = _aligned(f, basis)
    den = float(np.sum(fpow(basis.lambdas, alpha) * c ** 2))
    if den == 0.0:
        raise ValueError("Rayleigh quotient is undefined for the zero vector")
    num = float(c @ basis.masses) ** 2
    return num / den


def j_functional(f, basis: SpectralBasis, alpha: float) -> float:
    """Concave functional 2*integral(f) - |f|_alpha**2.

    Its maximizer is the torsion function, where the value equals the
    torsional rigidity.
    """
    _check_alpha(alpha)
    c = _aligned(f, basis)
    return float(2.0 * c @ basis.masses - np.sum(fpow(basis.lambdas, alpha) * c ** 2))


def simple_bounds(basis: SpectralBasis, alpha: float) -> tuple[float, float]:
    """One-mode lower bound mass_1**2 / lambda_1**alpha and the Bessel upper
    bound |G| / lambda_1**alpha."""
    _check_alpha(alpha)
    if not basis.pairs:
        raise ValueError("empty spectral basis")
    lam1 = basis.pairs[0].lam
    lower = basis.pairs[0].mass ** 2 / fpow(lam1, alpha)
    upper = total_length(basis.graph) / fpow(lam1, alpha)
    return float(lower), float(upper)


def project_edgewise_quadratic(basis: SpectralBasis, polys: dict) -> SpectralVector:
    """Project a function that is quadratic on each edge onto the basis.

    ``polys`` maps edge id to (p0, p1, p2) with f(s) = p0 + p1*s + p2*s**2 on
    that edge (missing edges count as zero). Inner products use closed-form
    antiderivatives of s**m * cos(k*s) and s**m * sin(k*s), so the projection
    is quadrature-free. This is enough to feed classical torsion functions
    into the variational quotient.
    """
    g: MetricGraph = basis.graph
    coeffs = np.zeros(basis.n_pairs)
    lengths = np.array([e.length for e in g.edges])
    poly = np.zeros((len(g.edges), 3))
    for eid, p in polys.items():
        poly[g.edge_ids.index(eid)] = p
    for n, pair in enumerate(basis.pairs):
        k = pair.k
        kl = k * lengths
        sin, cos = np.sin(kl), np.cos(kl)
        # integrals of s**m * cos(k s) over [0, l], m = 0, 1, 2
        ic0 = sin / k
        ic1 = lengths * sin / k + (cos - 1.0) / k ** 2
        ic2 = (lengths ** 2 / k - 2.0 / k ** 3) * sin + 2.0 * lengths * cos / k ** 2
        # integrals of s**m * sin(k s)
        is0 = (1.0 - cos) / k
        is1 = -lengths * cos / k + sin / k ** 2
        is2 = -(lengths ** 2) * cos / k + 2.0 * lengths * sin / k ** 2 + 2.0 * (cos - 1.0) / k ** 3
        ia = poly[:, 0] * ic0 + poly[:, 1] * ic1 + poly[:, 2] * ic2
        ib = poly[:, 0] * is0 + poly[:, 1] * is1 + poly[:, 2] * is2
        coeffs[n] = pair.coeffs[:, 0] @ ia + pair.coeffs[:, 1] @ ib
    return SpectralVector(coeffs)
