import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from graphtorsion import suite
from graphtorsion.graph import total_length
from graphtorsion.oracle import (
    OracleSizeError,
    discrete_parseval_defect,
    discretize,
    fd_rigidity,
    fd_rigidity_extrapolated,
    fd_spectrum,
    fd_torsion,
    richardson,
)
from graphtorsion.solver import scan_spectrum


def test_discretize_interval_h_quarter():
    d = discretize(suite.interval(), 0.25)
    assert d.n_nodes == 4  # 3 interior nodes + the Neumann endpoint
    k = d.stiffness.toarray()
    assert np.allclose(k, k.T)
    # interior rows carry 2/h on the diagonal, the free endpoint 1/h
    assert sorted(np.diag(k)) == pytest.approx([4.0, 8.0, 8.0, 8.0])
    eigs = np.linalg.eigvalsh(d.symmetric_operator().toarray())
    assert eigs.min() > 0.0


def test_discretize_weights_account_for_whole_graph():
    for g in (suite.interval(), suite.flower(2), suite.star3()):
        d = discretize(g, 0.01)
        total = float(d.weights.sum()) + d.eliminated_weight
        assert total == pytest.approx(total_length(g), abs=1e-12 * d.n_nodes)


def test_discretize_flower_touches_eliminated_center():
    d = discretize(suite.flower(1), 0.2)
    k = d.stiffness.toarray()
    # two rows (first and last interior node) lose a neighbor to the
    # eliminated Dirichlet center, so their row sums are positive
    row_sums = k.sum(axis=1)
    assert np.count_nonzero(row_sums > 1e-9) == 2


def test_discretize_rejects_coarse_mesh():
    with pytest.raises(ValueError):
        discretize(suite.interval(), 0.3)


def test_node_cap_enforced():
    with pytest.raises(OracleSizeError):
        fd_rigidity(suite.star3(), 1.2e-4, 1.0)


def test_eigenvalue_h2_convergence():
    g = suite.interval()
    exact = np.array([((2 * n - 1) * math.pi / 2.0) ** 2 for n in range(1, 4)])
    err = {}
    for h in (0.02, 0.01):
        mu = fd_spectrum(g, h, 3)
        err[h] = np.abs(mu - exact)
    ratio = err[0.02] / err[0.01]
    assert np.all(ratio > 3.4) and np.all(ratio < 4.6)


def test_eigenvalue_upper_consistency():
    g = suite.interval()
    h = 0.005
    exact = np.array([((2 * n - 1) * math.pi / 2.0) ** 2 for n in range(1, 6)])
    mu = fd_spectrum(g, h, 5)
    assert np.all(np.abs(mu - exact) <= 0.2 * h ** 2 * exact ** 2 + 1e-9)


def test_fd_rigidity_interval_fine_mesh():
    value = fd_rigidity(suite.interval(), 1e-3, 1.0)
    assert value == pytest.approx(1.0 / 3.0, abs=1e-4)


def test_fd_rigidity_star3_with_richardson():
    value = fd_rigidity_extrapolated(suite.star3(), 0.01, 1.0)
    assert value == pytest.approx(1.0, abs=1e-3)


def test_fd_matches_spectral_series_fractional():
    g = suite.flower(2)
    fd = fd_rigidity_extrapolated(g, 0.01, 0.5)
    basis = scan_spectrum(g, 120.0)
    from graphtorsion.fractional import rigidity

    r = rigidity(basis, 0.5)
    assert abs(fd - r.value) <= r.tail_bound + 5e-4


@given(st.floats(-5, 5), st.floats(0.01, 1.0), st.floats(-10, 10))
def test_richardson_exact_on_quadratic_error(true_value, h, c):
    v_h = true_value + c * h ** 2
    v_h2 = true_value + c * (h / 2.0) ** 2
    assert richardson(v_h, v_h2) == pytest.approx(true_value, abs=1e-9)


def test_richardson_interval_classical():
    v_h = fd_rigidity(suite.interval(), 1e-2, 1.0)
    v_h2 = fd_rigidity(suite.interval(), 5e-3, 1.0)
    extrapolated = richardson(v_h, v_h2)
    assert extrapolated == pytest.approx(1.0 / 3.0, abs=1e-6)
    # extrapolation beats the raw fine-mesh value
    assert abs(extrapolated - 1.0 / 3.0) < abs(v_h2 - 1.0 / 3.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_fd_torsion_entrywise_positive(alpha):
    u, _ = fd_torsion(suite.star3(), 0.01, alpha)
    assert np.all(u > 0.0)


def test_fd_torsion_matches_classical_midpoint():
    u, d = fd_torsion(suite.flower(1), 0.005, 1.0)
    mid = d.cells_per_edge["p1"] // 2
    idx = [key for key in range(d.n_nodes)]
    # the node map is deterministic: interior nodes follow vertex nodes
    # flower1 has no retained vertex nodes, so interior node j-1 sits at s=j*h
    he = 1.0 / d.cells_per_edge["p1"]
    assert u[mid - 1] == pytest.approx(0.5 * (mid * he) * (1.0 - mid * he), abs=1e-4)
    assert len(idx) == d.n_nodes


def test_discrete_parseval():
    g = suite.star3()
    h = 0.02
    defect = discrete_parseval_defect(g, h)
    # lost mass is exactly the eliminated Dirichlet endpoints' half-cells
    assert defect <= 3 * h
