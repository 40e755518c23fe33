"""Self-contained verification battery over the built-in graph suite.

Each check compares quantities whose relation is known: spectral series
against closed forms, the rigidity sandwich, surgery monotonicity, the
finite-difference oracle, positivity of the torsion function, and the
variational quotient. Tolerances combine the rigorous truncation tails of
the runs involved plus a small fixed slack, so a pass is meaningful and a
failure indicates a real defect (or an injected perturbation, see
``perturb``, which exists so the battery itself can be tested).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import suite
from .analytic import extremal_bounds, flower_rigidity, interval_rigidity_dn
from .fractional import (
    rayleigh_quotient,
    rigidity,
    simple_bounds,
    torsion_at,
    torsion_coefficients,
)
from .graph import GraphPoint, MetricGraph, insert_dummy_vertex, total_length, vertex_degree
from .oracle import fd_rigidity_extrapolated, fd_spectrum
from .solver import SolverOptions, SpectralBasis, scan_spectrum
from .surgery import cut_cycle, double_edges, glue_vertices, unfold_to_cycle

SLACK = 1e-8

# Scan ceilings sized so truncation tails stay small on every suite graph.
BATTERY_KMAX = {
    "interval": 80.0,
    "loop": 160.0,
    "flower1": 160.0,
    "flower2": 160.0,
    "flower3": 160.0,
    "star3": 65.0,
    "doubled-triangle": 45.0,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _perturbed(basis: SpectralBasis, eps: float) -> SpectralBasis:
    if eps == 0.0:
        return basis
    from .solver import EigenPair

    pairs = tuple(
        EigenPair(
            k=p.k * math.sqrt(1.0 + eps),
            lam=p.lam * (1.0 + eps),
            edge_ids=p.edge_ids,
            coeffs=p.coeffs,
            mass=p.mass,
        )
        for p in basis.pairs
    )
    return SpectralBasis(
        graph=basis.graph,
        pairs=pairs,
        kmax=basis.kmax,
        captured_mass=basis.captured_mass,
        next_lambda=basis.next_lambda * (1.0 + eps),
        options=basis.options,
        warnings=basis.warnings,
    )


def _kmax_for(g: MetricGraph, target_pairs: int = 70) -> float:
    return math.pi * (target_pairs + len(g.edges) + 2) / total_length(g)


class Battery:
    """Runs the checks, caching one spectral basis per graph."""

    def __init__(self, alphas, opts: SolverOptions | None = None, perturb: float = 0.0, seed: int = 20240901):
        self.alphas = list(alphas)
        self.opts = opts or SolverOptions()
        self.perturb = perturb
        self.rng = np.random.default_rng(seed)
        self.graphs = suite.suite_graphs()
        self._bases: dict = {}
        self.results: list[CheckResult] = []

    def basis(self, name: str) -> SpectralBasis:
        if name not in self._bases:
            g = self.graphs[name]
            self._bases[name] = _perturbed(
                scan_spectrum(g, BATTERY_KMAX[name], self.opts), self.perturb
            )
        return self._bases[name]

    def basis_of(self, g: MetricGraph, target_pairs: int = 70) -> SpectralBasis:
        return _perturbed(scan_spectrum(g, _kmax_for(g, target_pairs), self.opts), self.perturb)

    def check(self, name: str, passed: bool, detail: str) -> None:
        self.results.append(CheckResult(name, bool(passed), detail))

    # individual check groups -------------------------------------------------

    def closed_forms(self) -> None:
        for alpha in self.alphas:
            r = rigidity(self.basis("interval"), alpha)
            cf = interval_rigidity_dn(1.0, alpha)
            tol = r.tail_bound + 1e-9
            self.check(
                f"closed-form interval alpha={alpha:g}",
                abs(r.value - cf) <= tol,
                f"|{r.value:.12g} - {cf:.12g}| <= {tol:.3g}",
            )
            for n_petals, name in ((2, "flower2"), (3, "flower3")):
                r = rigidity(self.basis(name), alpha)
                cf = flower_rigidity(n_petals, 1.0, alpha)
                tol = r.tail_bound + 1e-9
                self.check(
                    f"closed-form {name} alpha={alpha:g}",
                    abs(r.value - cf) <= tol,
                    f"|{r.value:.12g} - {cf:.12g}| <= {tol:.3g}",
                )

    def bounds_sandwich(self) -> None:
        for name in self.graphs:
            g = self.graphs[name]
            basis = self.basis(name)
            for alpha in self.alphas:
                r = rigidity(basis, alpha)
                bounds = extremal_bounds(g, alpha)
                ok = (r.value + r.tail_bound >= bounds.lower - SLACK) and (
                    r.value <= bounds.upper + r.tail_bound
                )
                self.check(
                    f"bounds sandwich {name} alpha={alpha:g}",
                    ok,
                    f"{bounds.lower:.9g} <= [{r.value:.9g}, {r.value + r.tail_bound:.9g}] <= {bounds.upper:.9g}",
                )
                lo, up = simple_bounds(basis, alpha)
                ok = (lo <= r.value + SLACK) and (r.value <= up + SLACK)
                self.check(
                    f"simple bounds {name} alpha={alpha:g}",
                    ok,
                    f"{lo:.9g} <= {r.value:.9g} <= {up:.9g}",
                )

    def sharpness(self) -> None:
        for alpha in self.alphas:
            b_int = extremal_bounds(self.graphs["interval"], alpha)
            r = rigidity(self.basis("interval"), alpha)
            ok = (r.value <= b_int.upper + SLACK) and (b_int.upper <= r.value + r.tail_bound + SLACK)
            self.check(
                f"upper bound sharp on interval alpha={alpha:g}",
                ok,
                f"upper={b_int.upper:.9g} in [{r.value:.9g}, {r.value + r.tail_bound:.9g}]",
            )
            b_fl = extremal_bounds(self.graphs["flower2"], alpha)
            r = rigidity(self.basis("flower2"), alpha)
            ok = (r.value <= b_fl.lower + SLACK) and (b_fl.lower <= r.value + r.tail_bound + SLACK)
            self.check(
                f"lower bound sharp on flower2 alpha={alpha:g}",
                ok,
                f"lower={b_fl.lower:.9g} in [{r.value:.9g}, {r.value + r.tail_bound:.9g}]",
            )

    def surgery_monotonic(self) -> None:
        for name in self.graphs:
            g = self.graphs[name]
            basis = self.basis(name)
            doubled_basis = self.basis_of(double_edges(g))
            glued_basis = None
            if len(g.vertices) >= 2:
                glued_basis = self.basis_of(glue_vertices(g, g.vertices))
            unfolded_basis = None
            if all(vertex_degree(g, v) % 2 == 0 for v in g.vertices):
                unfolded_basis = self.basis_of(unfold_to_cycle(g))
            for alpha in self.alphas:
                r = rigidity(basis, alpha)
                rd = rigidity(doubled_basis, alpha)
                tol = r.tail_bound + rd.tail_bound + SLACK
                self.check(
                    f"doubling {name} alpha={alpha:g}",
                    r.value <= rd.value / 2.0 + tol,
                    f"{r.value:.9g} <= {rd.value / 2.0:.9g} + {tol:.3g}",
                )
                if glued_basis is not None:
                    rg = rigidity(glued_basis, alpha)
                    tol = r.tail_bound + rg.tail_bound + SLACK
                    self.check(
                        f"gluing {name} alpha={alpha:g}",
                        rg.value <= r.value + tol,
                        f"{rg.value:.9g} <= {r.value:.9g} + {tol:.3g}",
                    )
                if unfolded_basis is not None:
                    ru = rigidity(unfolded_basis, alpha)
                    tol = r.tail_bound + ru.tail_bound + SLACK
                    self.check(
                        f"unfolding {name} alpha={alpha:g}",
                        r.value <= ru.value + tol,
                        f"{r.value:.9g} <= {ru.value:.9g} + {tol:.3g}",
                    )

    def cut_equality(self) -> None:
        g = self.graphs["loop"]
        basis = self.basis("loop")
        cut_basis = self.basis_of(cut_cycle(g, "v0"), target_pairs=140)
        for alpha in self.alphas:
            rc = rigidity(basis, alpha)
            ri = rigidity(cut_basis, alpha)
            tol = rc.tail_bound + ri.tail_bound + SLACK
            self.check(
                f"cut equality loop alpha={alpha:g}",
                abs(rc.value - ri.value) <= tol,
                f"|{rc.value:.9g} - {ri.value:.9g}| <= {tol:.3g}",
            )

    def oracle_cross_check(self) -> None:
        g = self.graphs["star3"]
        t = fd_rigidity_extrapolated(g, 0.01, 1.0)
        if self.perturb:
            t *= 1.0 + self.perturb
        self.check(
            "oracle star3 classical rigidity",
            abs(t - 1.0) <= 1e-3,
            f"|{t:.9g} - 1| <= 1e-3",
        )
        mu = fd_spectrum(g, 0.005, 5)
        lam = self.basis("star3").lambdas[:5]
        rel = float(np.max(np.abs(mu - lam) / lam))
        self.check(
            "oracle star3 spectrum agreement",
            rel <= 1e-3,
            f"max relative eigenvalue gap {rel:.3g} <= 1e-3",
        )

    def positivity(self, points_per_graph: int = 20) -> None:
        for name in self.graphs:
            g = self.graphs[name]
            basis = self.basis(name)
            for alpha in self.alphas:
                worst = math.inf
                for _ in range(points_per_graph):
                    e = g.edges[self.rng.integers(len(g.edges))]
                    s = float(e.length * self.rng.uniform(1e-4, 1.0 - 1e-4))
                    worst = min(worst, torsion_at(basis, alpha, GraphPoint(e.id, s)).value)
                self.check(
                    f"torsion positivity {name} alpha={alpha:g}",
                    worst > 0.0,
                    f"min sampled value {worst:.6g}",
                )

    def variational(self, n_vectors: int = 20) -> None:
        for name in self.graphs:
            basis = self.basis(name)
            for alpha in self.alphas:
                r = rigidity(basis, alpha)
                cap = r.value + r.tail_bound + 1e-9 * (1.0 + r.value)
                worst = -math.inf
                for _ in range(n_vectors):
                    f = self.rng.standard_normal(basis.n_pairs)
                    worst = max(worst, rayleigh_quotient(f, basis, alpha))
                self.check(
                    f"rayleigh quotient bounded {name} alpha={alpha:g}",
                    worst <= cap,
                    f"max quotient {worst:.9g} <= {cap:.9g}",
                )
                u = torsion_coefficients(basis, alpha)
                q = rayleigh_quotient(u, basis, alpha)
                self.check(
                    f"quotient at torsion coefficients {name} alpha={alpha:g}",
                    abs(q - r.value) <= 1e-12 * max(1.0, r.value),
                    f"|{q:.15g} - {r.value:.15g}| <= 1e-12",
                )

    def dummy_invariance(self) -> None:
        g = self.graphs["star3"]
        split = insert_dummy_vertex(g, GraphPoint("e1", 0.37))
        b0 = self.basis_of(g, target_pairs=40)
        b1 = self.basis_of(split, target_pairs=40)
        n = min(b0.n_pairs, b1.n_pairs)
        rel = float(np.max(np.abs(b0.lambdas[:n] - b1.lambdas[:n]) / b0.lambdas[:n]))
        self.check(
            "dummy vertex spectrum invariance",
            rel <= 1e-9,
            f"max relative eigenvalue change {rel:.3g} <= 1e-9",
        )

    def run(self) -> list[CheckResult]:
        self.closed_forms()
        self.bounds_sandwich()
        self.sharpness()
        self.surgery_monotonic()
        self.cut_equality()
        self.oracle_cross_check()
        self.positivity()
        self.variational()
        self.dummy_invariance()
        return self.results


def run_battery(
    alphas=(0.5, 1.0),
    opts: SolverOptions | None = None,
    perturb: float = 0.0,
    seed: int = 20240901,
) -> list[CheckResult]:
    return Battery(alphas, opts, perturb, seed).run()
