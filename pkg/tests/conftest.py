import math

import pytest

from graphtorsion import suite
from graphtorsion.graph import total_length
from graphtorsion.solver import scan_spectrum

# Scan ceilings chosen so the rigidity tail bounds on the built-in graphs
# are small enough for every tolerance asserted below (<= 1e-6 at alpha = 1
# on the interval and flowers).
DEFAULT_KMAX = {
    "interval": 200.0 * math.pi,
    "loop": 190.0,
    "flower1": 190.1,
    "flower2": 190.1,
    "flower3": 190.1,
    "star3": 65.0,
    "doubled-triangle": 50.0,
}


@pytest.fixture(scope="session")
def spectra():
    """Memoized spectral bases, shared across the whole test session."""
    cache = {}

    def get(key, graph=None, kmax=None, target_pairs=70):
        if key not in cache:
            g = suite.builtin(key) if graph is None else graph
            if kmax is None:
                if key in DEFAULT_KMAX and graph is None:
                    km = DEFAULT_KMAX[key]
                else:
                    km = math.pi * (target_pairs + len(g.edges) + 2) / total_length(g)
            else:
                km = kmax
            cache[key] = scan_spectrum(g, km)
        return cache[key]

    return get
