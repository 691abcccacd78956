"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's evaluation routes:
elementary symmetric polynomials by subset enumeration, pencil eigenvalues
by characteristic-polynomial roots, integrals by plain summation.
"""

from itertools import combinations
from math import prod

import numpy as np
import pytest

from hessianlab import BackgroundData, ScalarField, TorusGrid


def esp_enumeration(values, k):
    """Subset-enumeration oracle for the k-th elementary symmetric polynomial."""
    vals = list(values)
    if k == 0:
        return 1.0
    return float(sum(prod(c) for c in combinations(vals, k)))


def pencil_roots_oracle(A, G):
    """Roots of det(A - lam G) via polynomial interpolation, descending."""
    n = A.shape[0]
    nodes = np.linspace(-3.0, 3.0, n + 1)
    vals = [np.linalg.det(A - lam * G).real for lam in nodes]
    coeffs = np.polyfit(nodes, vals, n)
    roots = np.roots(coeffs)
    return np.sort(roots.real)[::-1]


def random_hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (a + a.conj().T)


def random_spd(rng, n, jitter=0.5):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a @ a.conj().T + (1.0 + jitter) * np.eye(n)


def sample_cone_tuples(rng, n, m, count, lo=-0.6, hi=2.5, batch=4096):
    """Rejection-sample ``count`` tuples from the open degree-m cone."""
    from hessianlab import cone_margins

    out = []
    while sum(len(c) for c in out) < count:
        cand = rng.uniform(lo, hi, size=(batch, n))
        keep = cand[cone_margins(cand, m) > 0.0]
        out.append(keep)
    return np.concatenate(out)[:count]


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)


@pytest.fixture
def grid8():
    return TorusGrid(n=2, points_per_axis=8)


@pytest.fixture
def grid12():
    return TorusGrid(n=2, points_per_axis=12)


@pytest.fixture
def flat_bg(grid12):
    return BackgroundData.flat(grid12, kappa=1.0)


@pytest.fixture
def zero_field(grid12):
    return ScalarField.constant(grid12, 0.0)
