"""Random inputs for property tests and randomized runs."""

from __future__ import annotations

import numpy as np

from .fock import QutritCoefficients


def random_qutrit(rng: np.random.Generator) -> QutritCoefficients:
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    z /= np.linalg.norm(z)
    return QutritCoefficients(complex(z[0]), complex(z[1]), complex(z[2]))


def haar_unitary(rng: np.random.Generator, n: int = 3) -> np.ndarray:
    """Haar-distributed unitary via QR with the R-diagonal phase fix."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
