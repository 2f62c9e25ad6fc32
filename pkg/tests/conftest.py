from pathlib import Path

import numpy as np
import pytest

from qmarginals import fileio

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def random_hermitian(rng, n, scale=1.0):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (z + z.conj().T) / 2


def random_density_pair(rng, n1, n2):
    """Two random full-rank density matrices as plain arrays."""
    out = []
    for n in (n1, n2):
        p = rng.exponential(size=n)
        p /= p.sum()
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        q = np.linalg.qr(z)[0]
        out.append((q * p) @ q.conj().T)
    return out[0], out[1]


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def load_matrix(name):
    return fileio.read_matrix(FIXTURES / name)


def load_spectrum(name):
    return fileio.read_spectrum(FIXTURES / name)
