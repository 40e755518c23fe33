"""Eigensolver for the metric graph Laplacian via the secular matrix.

On each edge of length l the eigenfunction ansatz at wavenumber k is
``phi(s) = a*cos(k*s) + b*sin(k*s)``. Collecting the vertex conditions
(phi = 0 at every endpoint incident to a Dirichlet vertex, pairwise
continuity plus vanishing sum of derivatives at Kirchhoff vertices) gives a
square matrix M(k) of size 2|E|; k**2 is an eigenvalue exactly when M(k) is
singular. Eigenvalues are located as dips of the smallest singular value
sigma_min(k), not as sign changes of det M(k), because the determinant does
not change sign at even-multiplicity roots.

Derivative rows are divided by k so all matrix entries stay O(1); this does
not move the singular set. Derivatives are oriented into the vertex.

The scan grid, the golden-section refinement and the multiplicity detection
are all batched over numpy; the output is deterministic regardless of BLAS
scheduling because roots are sorted and eigenfunction signs are canonical
(mass coefficient >= 0, ties broken by the first nonzero coefficient).

At a Dirichlet vertex of degree > 1 every incident endpoint gets its own
phi = 0 row and no derivative condition is imposed, so e.g. the petals of a
flower graph with Dirichlet center decouple.

All L2 inner products and mass coefficients use closed-form trigonometric
antiderivatives; there is no quadrature error anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .graph import GraphPoint, MetricGraph, min_edge_length, require_valid, total_length

_CONST, _COS, _SIN = 0, 1, 2
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class SolverError(RuntimeError):
    """Numerical failure inside the eigensolver."""


@dataclass(frozen=True)
class SolverOptions:
    """Tunables for the spectrum scan.

    oversample multiplies the grid density; accept_tol and mult_tol are
    relative to the largest singular value of M(k); refine_width stops the
    golden-section search at a bracket of width refine_width*k;
    scan_extension is how many mean root spacings past kmax to look for the
    first eigenvalue beyond the scan (used for the truncation tail bound).
    """

    oversample: float = 1.0
    accept_tol: float = 1e-8
    mult_tol: float = 1e-6
    refine_width: float = 1e-13
    scan_extension: float = 6.0


@dataclass(frozen=True, eq=False)
class EigenPair:
    """One L2-normalized eigenfunction.

    coeffs has shape (n_edges, 2) holding (a_e, b_e) per edge, aligned with
    edge_ids; mass is the inner product of the constant 1 with the
    eigenfunction.
    """

    k: float
    lam: float
    edge_ids: tuple[str, ...]
    coeffs: np.ndarray
    mass: float

    def edge_coeffs(self, edge_id: str) -> tuple[float, float]:
        try:
            i = self.edge_ids.index(edge_id)
        except ValueError:
            raise KeyError(f"unknown edge id: {edge_id!r}") from None
        return float(self.coeffs[i, 0]), float(self.coeffs[i, 1])


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Sorted eigenpairs with k in (0, kmax] plus truncation bookkeeping.

    captured_mass is the sum of squared mass coefficients (bounded by the
    total length, by Bessel). next_lambda is the first eigenvalue beyond the
    scan when it was located, otherwise a rigorous lower estimate; it feeds
    the truncation tail bound of the rigidity series.
    """

    graph: MetricGraph
    pairs: tuple[EigenPair, ...]
    kmax: float
    captured_mass: float
    next_lambda: float
    options: SolverOptions
    warnings: tuple[str, ...] = field(default=())

    @cached_property
    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.pairs])

    @cached_property
    def ks(self) -> np.ndarray:
        return np.array([p.k for p in self.pairs])

    @cached_property
    def masses(self) -> np.ndarray:
        return np.array([p.mass for p in self.pairs])

    @cached_property
    def coeff_tensor(self) -> np.ndarray:
        """Stacked edge coefficients, shape (n_pairs, n_edges, 2)."""
        return np.stack([p.coeffs for p in self.pairs])

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)


class _Assembler:
    """Precompiled secular matrix for one graph, evaluated at batches of k."""

    def __init__(self, g: MetricGraph):
        require_valid(g)
        self.graph = g
        self.edge_ids = g.edge_ids
        self.lengths = np.array([e.length for e in g.edges])
        self.n_edges = len(g.edges)
        self.size = 2 * self.n_edges
        self.total_length = total_length(g)
        self.min_length = min_edge_length(g)
        dirichlet = g.dirichlet_set

        # Endpoint slots per vertex, ordered by (edge id, end) so row layout
        # is reproducible. end 0 is the source end, end 1 the target end.
        slots: dict[str, list[tuple[str, int, int]]] = {v: [] for v in g.vertices}
        for idx, e in enumerate(g.edges):
            slots[e.source].append((e.id, 0, idx))
            slots[e.target].append((e.id, 1, idx))
        for v in slots:
            slots[v].sort(key=lambda t: (t[0], t[1]))

        rows: list[int] = []
        cols: list[int] = []
        kinds: list[int] = []
        eidx: list[int] = []
        mults: list[float] = []

        def put(row, entries, scale):
            for col, kind, mult in entries:
                rows.append(row)
                cols.append(col)
                kinds.append(kind)
                eidx.append(col // 2)
                mults.append(mult * scale)

        def value_stencil(end, idx):
            if end == 0:
                return [(2 * idx, _CONST, 1.0)]
            return [(2 * idx, _COS, 1.0), (2 * idx + 1, _SIN, 1.0)]

        def derivative_stencil(end, idx):
            # Derivative into the vertex, divided by k.
            if end == 0:
                return [(2 * idx + 1, _CONST, -1.0)]
            return [(2 * idx, _SIN, -1.0), (2 * idx + 1, _COS, 1.0)]

        row = 0
        for v in g.vertices:
            vslots = slots[v]
            if v in dirichlet:
                for _, end, idx in vslots:
                    put(row, value_stencil(end, idx), 1.0)
                    row += 1
            else:
                for (_, e0, i0), (_, e1, i1) in zip(vslots, vslots[1:]):
                    put(row, value_stencil(e0, i0), 1.0)
                    put(row, value_stencil(e1, i1), -1.0)
                    row += 1
                for _, end, idx in vslots:
                    put(row, derivative_stencil(end, idx), 1.0)
                row += 1
        if row != self.size:
            raise SolverError(f"secular row count {row} != {self.size}")

        self._rows = np.array(rows)
        self._cols = np.array(cols)
        self._kinds = np.array(kinds)
        self._eidx = np.array(eidx)
        self._mults = np.array(mults)
        self._flat = self._rows * self.size + self._cols
        # Lipschitz bound for sigma_min(k): |d sigma_min/dk| <= ||dM/dk||_F,
        # and only trigonometric entries depend on k, with derivative
        # magnitude at most |mult| * edge length.
        trig = self._kinds != _CONST
        self.sigma_lipschitz = float(
            np.sqrt(np.sum((self._mults[trig] * self.lengths[self._eidx[trig]]) ** 2))
        )

    def matrices(self, ks) -> np.ndarray:
        ks = np.atleast_1d(np.asarray(ks, dtype=float))
        kl = ks[:, None] * self.lengths[None, :]
        tables = (None, np.cos(kl), np.sin(kl))
        vals = np.empty((len(self._rows), len(ks)))
        for kind in (_CONST, _COS, _SIN):
            mask = self._kinds == kind
            if not mask.any():
                continue
            if kind == _CONST:
                vals[mask] = self._mults[mask, None]
            else:
                vals[mask] = tables[kind][:, self._eidx[mask]].T * self._mults[mask, None]
        flat = np.zeros((self.size * self.size, len(ks)))
        np.add.at(flat, self._flat, vals)
        return flat.T.reshape(len(ks), self.size, self.size)

    def singular_values(self, ks) -> np.ndarray:
        return np.linalg.svd(self.matrices(ks), compute_uv=False)

    def sigma_min(self, ks) -> np.ndarray:
        return self.singular_values(ks)[:, -1]

    def svd_at(self, k):
        m = self.matrices([k])[0]
        _, s, vh = np.linalg.svd(m)
        return s, vh

    def edge_integrals(self, k):
        """Closed-form edgewise integrals of cos*cos, cos*sin, sin*sin."""
        kl = k * self.lengths
        s2 = np.sin(2.0 * kl)
        icc = self.lengths / 2.0 + s2 / (4.0 * k)
        iss = self.lengths / 2.0 - s2 / (4.0 * k)
        ics = np.sin(kl) ** 2 / (2.0 * k)
        return icc, ics, iss

    def gram(self, k, vecs) -> np.ndarray:
        """L2 Gram matrix of coefficient vectors laid out [a0, b0, a1, b1, ...]."""
        icc, ics, iss = self.edge_integrals(k)
        a = vecs[:, 0::2]
        b = vecs[:, 1::2]
        return (a * icc) @ a.T + (a * ics) @ b.T + (b * ics) @ a.T + (b * iss) @ b.T

    def mass_vector(self, k, vecs) -> np.ndarray:
        kl = k * self.lengths
        wa = np.sin(kl) / k
        wb = (1.0 - np.cos(kl)) / k
        return vecs[:, 0::2] @ wa + vecs[:, 1::2] @ wb


def secular_matrix(g: MetricGraph, k: float) -> np.ndarray:
    """The 2|E| x 2|E| vertex-condition matrix at wavenumber k."""
    if k <= 0:
        raise ValueError("wavenumber k must be positive")
    return _Assembler(g).matrices([k])[0]


def sigma_min(g: MetricGraph, k: float) -> float:
    """Smallest singular value of the secular matrix; zero iff k**2 is an eigenvalue."""
    if k <= 0:
        raise ValueError("wavenumber k must be positive")
    return float(_Assembler(g).sigma_min([k])[0])


def _golden_minimize(asm: _Assembler, a, b, rel_width):
    """Vectorized golden-section minimization of sigma_min on brackets [a, b]."""
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = asm.sigma_min(x1)
    f2 = asm.sigma_min(x2)
    tol = rel_width * b
    for _ in range(300):
        active = (b - a) > tol
        if not active.any():
            break
        left = active & (f1 <= f2)
        right = active & ~(f1 <= f2)
        b[left] = x2[left]
        x2[left] = x1[left]
        f2[left] = f1[left]
        x1[left] = b[left] - _GOLDEN * (b[left] - a[left])
        a[right] = x1[right]
        x1[right] = x2[right]
        f1[right] = f2[right]
        x2[right] = a[right] + _GOLDEN * (b[right] - a[right])
        fresh = np.concatenate([x1[left], x2[right]])
        if fresh.size:
            fvals = asm.sigma_min(fresh)
            f1[left] = fvals[: int(left.sum())]
            f2[right] = fvals[int(left.sum()):]
    ks = np.where(f1 <= f2, x1, x2)
    fs = np.minimum(f1, f2)
    return ks, fs


def _orthonormalize(asm: _Assembler, k, vecs):
    """L2-orthonormalize null vectors sharing one root; canonicalize signs.

    Uses symmetric (Loewdin) orthogonalization so an already orthonormal
    input comes back unchanged up to sign. Returns (vecs, masses).
    """
    gram = asm.gram(k, vecs)
    w, u = np.linalg.eigh(gram)
    if w[0] <= 1e-10 * w[-1]:
        raise SolverError(
            f"numerically dependent null vectors at k={k!r}; nullity misdetected"
        )
    mix = u @ np.diag(w ** -0.5) @ u.T
    vecs = mix @ vecs
    masses = asm.mass_vector(k, vecs)
    mass_floor = 1e-11 * math.sqrt(asm.total_length)
    for i in range(len(vecs)):
        if abs(masses[i]) > mass_floor:
            if masses[i] < 0:
                vecs[i] = -vecs[i]
                masses[i] = -masses[i]
        else:
            lead = np.flatnonzero(np.abs(vecs[i]) > 1e-9 * np.abs(vecs[i]).max())
            if lead.size and vecs[i, lead[0]] < 0:
                vecs[i] = -vecs[i]
    return vecs, masses


def orthonormalize(pairs, g: MetricGraph):
    """Re-orthonormalize eigenpairs sharing one eigenvalue.

    The span is preserved and the Gram matrix of the output is the identity;
    inner products are closed-form, no quadrature.
    """
    pairs = list(pairs)
    if not pairs:
        return []
    asm = _Assembler(g)
    k = pairs[0].k
    vecs = np.stack([p.coeffs.reshape(-1) for p in pairs])
    vecs, masses = _orthonormalize(asm, k, vecs)
    return [
        EigenPair(
            k=k,
            lam=k * k,
            edge_ids=asm.edge_ids,
            coeffs=vecs[i].reshape(-1, 2),
            mass=float(masses[i]),
        )
        for i in range(len(pairs))
    ]


def mass_coefficient(p: EigenPair, g: MetricGraph) -> float:
    """Closed-form integral of the eigenfunction over the graph.

    Equals sum over edges of (a*sin(k*l) + b*(1 - cos(k*l))) / k.
    """
    asm_lengths = np.array([g.edge(eid).length for eid in p.edge_ids])
    kl = p.k * asm_lengths
    wa = np.sin(kl) / p.k
    wb = (1.0 - np.cos(kl)) / p.k
    return float(p.coeffs[:, 0] @ wa + p.coeffs[:, 1] @ wb)


def eval_eigenfunction(p: EigenPair, x: GraphPoint) -> float:
    """Value a*cos(k*s) + b*sin(k*s) of the eigenfunction at a graph point."""
    a, b = p.edge_coeffs(x.edge)
    return a * math.cos(p.k * x.s) + b * math.sin(p.k * x.s)


def vertex_residual(g: MetricGraph, p: EigenPair) -> float:
    """Max vertex-condition residual of a pair, relative to the coefficient norm."""
    asm = _Assembler(g)
    m = asm.matrices([p.k])[0]
    x = p.coeffs.reshape(-1)
    return float(np.abs(m @ x).max() / np.linalg.norm(x))


def grid_step(g: MetricGraph, opts: SolverOptions) -> float:
    """Scan resolution: fine enough for the mean Weyl spacing pi/|G| and for
    the shortest edge, oversampled by a factor 4 to guard root clusters."""
    length = total_length(g)
    lmin = min_edge_length(g)
    return min(math.pi / (4.0 * length), math.pi / (16.0 * lmin)) / opts.oversample


def scan_spectrum(g: MetricGraph, kmax: float, opts: SolverOptions | None = None) -> SpectralBasis:
    """Locate every eigenvalue with k in (0, kmax], with multiplicities.

    Scans sigma_min on a uniform grid, golden-section refines every local
    minimum, and accepts a root when the refined sigma_min falls below
    accept_tol times the matrix norm. Multiplicity is the number of singular
    values below mult_tol relative; the corresponding right singular vectors
    are L2-orthonormalized into eigenpairs. The scan continues a few mean
    spacings beyond kmax so the first out-of-range eigenvalue is available
    for truncation tail bounds.
    """
    if kmax <= 0:
        raise ValueError("kmax must be positive")
    opts = opts or SolverOptions()
    asm = _Assembler(g)
    length = asm.total_length
    dk = grid_step(g, opts)
    spacing = math.pi / length
    kend = kmax + opts.scan_extension * spacing
    ks = dk * np.arange(1, int(math.ceil(kend / dk)) + 2)
    sig = asm.sigma_min(ks)

    # Candidate brackets. Local minima of the sampled sigma_min catch
    # well-separated dips; on top of those, any single grid interval where
    # sigma(a) + sigma(b) <= L * dk could hide a zero of a function with
    # Lipschitz constant L (necessary condition), which recovers roots whose
    # dip falls between samples next to a deeper neighbor.
    interior = (sig[1:-1] < sig[:-2]) & (sig[1:-1] <= sig[2:])
    idx = np.nonzero(interior)[0] + 1
    reach = 1.05 * asm.sigma_lipschitz * dk
    narrow = np.nonzero(sig[:-1] + sig[1:] <= reach)[0]
    lo = np.concatenate([ks[idx - 1], ks[narrow]])
    hi = np.concatenate([ks[idx + 1], ks[narrow + 1]])
    # bracket index ranges, used to tell true collapses from overlapping
    # brackets that legitimately find the same root
    span_lo = np.concatenate([idx - 1, narrow])
    span_hi = np.concatenate([idx + 1, narrow + 1])

    warnings: list[str] = []
    roots: list[float] = []
    if lo.size:
        refined, _ = _golden_minimize(asm, lo, hi, opts.refine_width)
        order = np.argsort(refined)
        spans: list[tuple[int, int]] = []
        for j in order:
            k = float(refined[j])
            span = (int(span_lo[j]), int(span_hi[j]))
            if roots and abs(k - roots[-1]) <= 1e-9 * max(1.0, k):
                if spans[-1][1] < span[0]:
                    warnings.append(
                        f"scan grid too coarse: disjoint brackets collapsed near k={k:.9g}"
                    )
                continue
            roots.append(k)
            spans.append(span)

    pairs: list[EigenPair] = []
    next_lambda = None
    for k in roots:
        s, vh = asm.svd_at(k)
        if s[-1] >= opts.accept_tol * s[0]:
            continue
        mult = int(np.count_nonzero(s < opts.mult_tol * s[0]))
        if k > kmax * (1.0 + 1e-12):
            if next_lambda is None:
                next_lambda = k * k
            continue
        vecs, masses = _orthonormalize(asm, k, vh[-mult:].copy())
        for i in range(mult):
            pairs.append(
                EigenPair(
                    k=k,
                    lam=k * k,
                    edge_ids=asm.edge_ids,
                    coeffs=vecs[i].reshape(-1, 2),
                    mass=float(masses[i]),
                )
            )

    count = len(pairs)
    weyl_low = length * kmax / math.pi - asm.n_edges
    if count < weyl_low - 1.0:
        warnings.append(
            f"possible missed eigenvalues: found {count} with k <= {kmax:.6g}, "
            f"Weyl count estimate is at least {weyl_low:.2f}"
        )
    if next_lambda is None:
        weyl_next = (math.pi * max(0, count + 1 - asm.n_edges) / length) ** 2
        last = pairs[-1].lam if pairs else 0.0
        next_lambda = max(last, weyl_next)
        warnings.append(
            "no eigenvalue found beyond kmax within the scan extension; "
            "tail bounds use the Weyl lower estimate"
        )

    captured = float(sum(p.mass ** 2 for p in pairs))
    return SpectralBasis(
        graph=g,
        pairs=tuple(pairs),
        kmax=float(kmax),
        captured_mass=captured,
        next_lambda=float(next_lambda),
        options=opts,
        warnings=tuple(warnings),
    )


def scan_n_eigenvalues(g: MetricGraph, n: int, opts: SolverOptions | None = None) -> SpectralBasis:
    """Scan until at least ``n`` eigenpairs are found, then truncate to ``n``.

    The (n+1)-th root is kept as next_lambda so tail bounds stay rigorous.
    """
    if n < 1:
        raise ValueError("need at least one eigenvalue")
    length = total_length(g)
    kmax = math.pi * (n + len(g.edges) + 2) / length
    basis = scan_spectrum(g, kmax, opts)
    for _ in range(12):
        if basis.n_pairs > n:
            break
        kmax *= 1.4
        basis = scan_spectrum(g, kmax, opts)
    if basis.n_pairs < n:
        raise SolverError(f"could not locate {n} eigenvalues up to kmax={kmax:.6g}")
    if basis.n_pairs == n:
        return basis
    pairs = basis.pairs[:n]
    return SpectralBasis(
        graph=g,
        pairs=pairs,
        kmax=pairs[-1].k,
        captured_mass=float(sum(p.mass ** 2 for p in pairs)),
        next_lambda=basis.pairs[n].lam,
        options=basis.options,
        warnings=basis.warnings,
    )
