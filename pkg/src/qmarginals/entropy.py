"""Entropy functionals and their gradients.

Natural logarithm throughout. Eigenvalues are floored at 1e-15 before logs
and fractional powers so gradients stay finite at the PSD boundary.
"""

from __future__ import annotations

import numpy as np

from .tensorcore import PSD_ATOL, density_input, hermitian_eig, hermitize

LOG_FLOOR = 1e-15


def _clipped_spectrum(rho) -> np.ndarray:
    values = np.linalg.eigvalsh(np.asarray(getattr(rho, "matrix", rho)))
    if values[0] < -PSD_ATOL:
        raise ValueError(f"matrix is not PSD within {PSD_ATOL}: min eigenvalue {values[0]}")
    return np.clip(values, 0.0, None)


def entropy_from_spectrum(values: np.ndarray) -> float:
    v = np.clip(np.asarray(values, dtype=float), 0.0, None)
    v = v[v > 0.0]
    return float(-(v * np.log(v)).sum()) if v.size else 0.0


def von_neumann(rho) -> float:
    """S(rho) = -sum lambda_j ln lambda_j, with 0 ln 0 = 0."""
    return entropy_from_spectrum(_clipped_spectrum(rho))


def renyi(rho, alpha: float) -> float:
    """S_alpha(rho) = ln(sum lambda_j^alpha) / (1 - alpha), alpha >= 0, alpha != 1."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if alpha == 1:
        raise ValueError("alpha = 1 is the von Neumann limit; use von_neumann")
    v = _clipped_spectrum(rho)
    v = v[v > 0.0]
    return float(np.log(np.sum(v ** alpha)) / (1.0 - alpha))


def negative_entropy(rho) -> float:
    """tr(rho ln rho) = -S(rho); the convex objective the entropy solver descends."""
    return -von_neumann(rho)


def grad_von_neumann_objective(rho) -> np.ndarray:
    """Gradient of tr(rho ln rho): ln(rho) + I, eigenvalues floored at 1e-15."""
    m = density_input(rho)
    values, u = hermitian_eig(m)
    g = np.log(np.clip(values, LOG_FLOOR, None)) + 1.0
    return hermitize((u * g) @ u.conj().T)


def grad_renyi(rho, alpha: float) -> np.ndarray:
    """Gradient of S_alpha: alpha/(1 - alpha) * rho^(alpha-1) / tr(rho^alpha)."""
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if alpha == 1:
        raise ValueError("alpha = 1 is the von Neumann limit")
    m = density_input(rho)
    values, u = hermitian_eig(m)
    v = np.clip(values, LOG_FLOOR, None)
    powers = v ** (alpha - 1.0)
    scale = alpha / ((1.0 - alpha) * float(np.sum(v ** alpha)))
    return hermitize(scale * (u * powers) @ u.conj().T)
