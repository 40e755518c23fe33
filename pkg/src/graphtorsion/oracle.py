"""Independent finite-difference verification.

The graph is meshed edge by edge, the Laplacian is assembled as the standard
second-difference stiffness matrix with shared nodes and flux balance at
Kirchhoff vertices, Dirichlet nodes are eliminated, and quadrature uses
lumped trapezoidal weights. With lumped weights D the operator
D**-1/2 K D**-1/2 is symmetric, so fractional quantities follow from a plain
orthogonal eigendecomposition. Everything in here converges at O(h**2) and
exists only to cross-check the closed-form-free spectral pipeline; it is
desk-scale by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .analytic import fpow
from .graph import MetricGraph, min_edge_length, require_valid, total_length

NODE_CAP = 20_000


class OracleSizeError(ValueError):
    """The requested mesh exceeds the dense eigendecomposition cap."""


@dataclass(frozen=True, eq=False)
class Discretization:
    """Mesh of the graph with Dirichlet nodes eliminated.

    weights are the trapezoidal quadrature weights of the retained nodes;
    eliminated_weight is the quadrature mass sitting at eliminated Dirichlet
    vertices, so weights.sum() + eliminated_weight equals the total length
    exactly (up to rounding of the additions).
    """

    graph: MetricGraph
    h: float
    cells_per_edge: dict
    stiffness: scipy.sparse.csr_matrix
    weights: np.ndarray
    eliminated_weight: float

    @property
    def n_nodes(self) -> int:
        return self.stiffness.shape[0]

    def symmetric_operator(self) -> scipy.sparse.csr_matrix:
        inv_sqrt = 1.0 / np.sqrt(self.weights)
        d = scipy.sparse.diags(inv_sqrt)
        return (d @ self.stiffness @ d).tocsr()


def discretize(g: MetricGraph, h: float) -> Discretization:
    """Mesh every edge with ceil(length/h) uniform cells."""
    require_valid(g)
    if h <= 0:
        raise ValueError("mesh width must be positive")
    lmin = min_edge_length(g)
    if h > lmin / 4.0:
        raise ValueError(
            f"mesh width {h!r} too coarse: need h <= {lmin / 4.0!r} (shortest edge / 4)"
        )
    dirichlet = g.dirichlet_set
    index: dict = {}
    for v in g.vertices:
        if v not in dirichlet:
            index[("v", v)] = len(index)
    cells_per_edge = {}
    for e in g.edges:
        n_cells = int(math.ceil(e.length / h))
        cells_per_edge[e.id] = n_cells
        for j in range(1, n_cells):
            index[("e", e.id, j)] = len(index)

    n = len(index)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    weights = np.zeros(n)
    eliminated = 0.0

    for e in g.edges:
        n_cells = cells_per_edge[e.id]
        he = e.length / n_cells
        chain = [index.get(("v", e.source), -1)]
        chain += [index[("e", e.id, j)] for j in range(1, n_cells)]
        chain.append(index.get(("v", e.target), -1))
        inv = 1.0 / he
        half = he / 2.0
        for left, right in zip(chain[:-1], chain[1:]):
            for node in (left, right):
                if node >= 0:
                    weights[node] += half
                else:
                    eliminated += half
            if left >= 0 and right >= 0:
                rows += [left, right, left, right]
                cols += [left, right, right, left]
                vals += [inv, inv, -inv, -inv]
            elif left >= 0:
                rows.append(left)
                cols.append(left)
                vals.append(inv)
            elif right >= 0:
                rows.append(right)
                cols.append(right)
                vals.append(inv)

    stiffness = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    return Discretization(
        graph=g,
        h=h,
        cells_per_edge=cells_per_edge,
        stiffness=stiffness,
        weights=weights,
        eliminated_weight=eliminated,
    )


def _check_cap(d: Discretization) -> None:
    if d.n_nodes > NODE_CAP:
        raise OracleSizeError(
            f"mesh has {d.n_nodes} nodes, above the {NODE_CAP} cap; use a coarser h"
        )


def fd_eigensystem(g: MetricGraph, h: float):
    """Dense weighted eigendecomposition: eigenvalues mu, matrix of mass
    coefficients <1, psi_k>_w, and the discretization."""
    d = discretize(g, h)
    _check_cap(d)
    b = d.symmetric_operator().toarray()
    mu, y = scipy.linalg.eigh(b)
    mass = np.sqrt(d.weights) @ y
    return mu, mass, y, d

def fd_spectrum(g: MetricGraph, h: float, n: int) -> np.ndarray:
    """First n discrete eigenvalues, via sparse shift-invert."""
    d = discretize(g, h)
    _check_cap(d)
    b = d.symmetric_operator()
    if n >= b.shape[0] - 1:
        raise ValueError("n too large for this mesh")
    mu = scipy.sparse.linalg.eigsh(b, k=n, sigma=0.0, which="LM", return_eigenvectors=False)
    return np.sort(mu)


def fd_rigidity(g: MetricGraph, h: float, alpha: float) -> float:
    """Discrete torsional rigidity: sum of <1, psi_k>_w**2 / mu_k**alpha."""
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must be in (0, 1], got {alpha!r}")
    mu, mass, _, _ = fd_eigensystem(g, h)
    if mu[0] <= 0.0:
        raise ValueError("discrete operator is not positive definite")
    return float(np.sum(mass ** 2 * fpow(mu, -alpha)))


def fd_torsion(g: MetricGraph, h: float, alpha: float):
    """Discrete torsion vector on the retained nodes, plus the discretization."""
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must be in (0, 1], got {alpha!r}")
    mu, mass, y, d = fd_eigensystem(g, h)
    if mu[0] <= 0.0:
        raise ValueError("discrete operator is not positive definite")
    u = (y * fpow(mu, -alpha)) @ mass / np.sqrt(d.weights)
    return u, d


def richardson(value_h: float, value_h2: float) -> float:
    """Second-order Richardson extrapolation from values at h and h/2."""
    return (4.0 * value_h2 - value_h) / 3.0


def fd_rigidity_extrapolated(g: MetricGraph, h: float, alpha: float) -> float:
    return richardson(fd_rigidity(g, h, alpha), fd_rigidity(g, h / 2.0, alpha))


def discrete_parseval_defect(g: MetricGraph, h: float) -> float:
    """|sum_k <1, psi_k>_w**2 - |G|| , which is the quadrature mass lost at
    eliminated Dirichlet nodes; O(h)."""
    mu, mass, _, d = fd_eigensystem(g, h)
    return abs(float(np.sum(mass ** 2)) - total_length(g))
