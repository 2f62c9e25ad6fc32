"""Least-squares projections used by the solvers.

Three families of constraint sets appear:

* the affine set of Hermitian matrices with prescribed reduced states
  (bipartite closed form and the general multipartite inclusion-exclusion),
* the unitary orbit of a fixed spectrum,
* the PSD cone.

All projections are in the Frobenius norm.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .tensorcore import (
    SystemDims,
    as_dims,
    as_spectrum,
    hermitian_eig,
    hermitize,
    kron,
    partial_trace,
    subsystem_permutation,
    _as_square,
)

CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class MarginalConstraint:
    """Prescribed reduced state on the subsystems named by `keep` (1-based labels)."""

    keep: tuple[int, ...]
    target: np.ndarray

    def __init__(self, keep, target):
        keep = tuple(sorted({int(i) for i in keep}))
        if not keep:
            raise ValueError("kept-index set must be nonempty")
        m = hermitize(_as_square(target, "constraint target"))
        m.setflags(write=False)
        object.__setattr__(self, "keep", keep)
        object.__setattr__(self, "target", m)


class ConstraintSet:
    """A family {(J_i, sigma_i)} of marginal constraints on a fixed factorization."""

    def __init__(self, dims, constraints):
        self.dims = as_dims(dims)
        parsed = []
        for c in constraints:
            if not isinstance(c, MarginalConstraint):
                keep, target = c
                c = MarginalConstraint(keep, target)
            keep = self.dims.validate_keep(c.keep)
            if c.target.shape[0] != self.dims.subdim(keep):
                raise ValueError(
                    f"target for keep={keep} has order {c.target.shape[0]}, "
                    f"expected {self.dims.subdim(keep)}"
                )
            parsed.append(c)
        keeps = [c.keep for c in parsed]
        if len(set(keeps)) != len(keeps):
            raise ValueError("duplicate kept-index sets in constraint set")
        if not parsed:
            raise ValueError("constraint set must contain at least one constraint")
        self.constraints = tuple(parsed)

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def derived_target(self, labels: tuple[int, ...]) -> np.ndarray | float:
        """Reduced state forced on `labels` by the first constraint containing it.

        The empty label set degenerates to the common trace of the targets.
        """
        for c in self.constraints:
            if set(labels) <= set(c.keep):
                if labels == c.keep:
                    return c.target
                if not labels:
                    return float(np.trace(c.target).real)
                local = tuple(c.keep.index(i) + 1 for i in labels)
                return partial_trace(c.target, self.dims.local_dims(c.keep), local)
        raise ValueError(f"no constraint contains labels {labels}")

    @cached_property
    def correction_terms(self) -> tuple[tuple[float, tuple[int, ...], object], ...]:
        """Inclusion-exclusion plan: (coefficient, intersection labels, target).

        Every subset {J_{i_1}, ..., J_{i_r}} of the constraints contributes
        (-1)^r times the correction on the intersection of its kept sets;
        subsets sharing an intersection are merged into one coefficient.
        An empty intersection contributes the global-trace correction.
        """
        report = check_consistency(self, CONSISTENCY_TOL)
        if not report.consistent:
            raise ValueError(
                f"inconsistent constraint set: max marginal discrepancy "
                f"{report.max_discrepancy:.3e} exceeds {CONSISTENCY_TOL}"
            )
        coef: dict[tuple[int, ...], float] = {}
        m = len(self.constraints)
        for r in range(1, m + 1):
            for subset in itertools.combinations(self.constraints, r):
                inter = set(subset[0].keep)
                for c in subset[1:]:
                    inter &= set(c.keep)
                key = tuple(sorted(inter))
                coef[key] = coef.get(key, 0.0) + (-1.0) ** r
        terms = []
        for key, w in sorted(coef.items()):
            if w == 0.0:
                continue
            terms.append((w, key, self.derived_target(key)))
        return tuple(terms)


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    derived_marginals: dict
    max_discrepancy: float


def check_consistency(cs: ConstraintSet, tol: float = CONSISTENCY_TOL) -> ConsistencyReport:
    """Test whether the prescribed marginals can coexist.

    For every subset of constraints with a nonempty intersection of kept
    sets, the targets traced down to that intersection must agree; the empty
    intersection degenerates to all targets having unit trace.
    """
    worst = 0.0
    derived: dict[tuple[int, ...], np.ndarray] = {}
    for c in cs.constraints:
        worst = max(worst, abs(float(np.trace(c.target).real) - 1.0))
    cons = list(cs.constraints)
    for r in range(2, len(cons) + 1):
        for subset in itertools.combinations(cons, r):
            inter = set(subset[0].keep)
            for c in subset[1:]:
                inter &= set(c.keep)
            if not inter:
                continue
            labels = tuple(sorted(inter))
            reduced = []
            for c in subset:
                local = tuple(c.keep.index(i) + 1 for i in labels)
                if labels == c.keep:
                    reduced.append(c.target)
                else:
                    reduced.append(partial_trace(c.target, cs.dims.local_dims(c.keep), local))
            if labels not in derived:
                derived[labels] = reduced[0]
            for x, y in itertools.combinations(reduced, 2):
                worst = max(worst, float(np.linalg.norm(x - y)))
    return ConsistencyReport(consistent=worst <= tol, derived_marginals=derived,
                             max_discrepancy=worst)


def marginal_correction(z, sigma, dims, keep) -> np.ndarray:
    """M_J(Z, sigma) = P_J^T (I/n_{J^c} x (tr_{J^c}(Z) - sigma)) P_J.

    Z - M_J(Z, sigma) is the least-squares point whose marginal on `keep`
    equals sigma. With `keep` covering every subsystem no permutation or
    identity factor is needed and the correction is Z - sigma itself.
    """
    dims = as_dims(dims)
    z = _as_square(z)
    j = dims.validate_keep(keep)
    sigma = np.asarray(getattr(sigma, "matrix", sigma), dtype=complex)
    nj = dims.subdim(j)
    if sigma.shape != (nj, nj):
        raise ValueError(f"target for keep={j} must have order {nj}, got {sigma.shape}")
    deficit = partial_trace(z, dims, j) - sigma
    if len(j) == dims.k:
        return deficit
    njc = dims.subdim(dims.complement(j))
    p = subsystem_permutation(dims, j)
    return p.T @ kron(np.eye(njc) / njc, deficit) @ p


def _trace_correction(z: np.ndarray, target_trace: float) -> np.ndarray:
    n = z.shape[0]
    return (float(np.trace(z).real) - target_trace) / n * np.eye(n)


def project_marginals(z, cs: ConstraintSet) -> np.ndarray:
    """Frobenius projection onto {X : tr_{J_i^c}(X) = sigma_i for all i}.

    Inclusion-exclusion over constraint subsets; intersections of kept sets
    carry the derived marginals, the empty intersection the global trace.
    """
    z = hermitize(_as_square(z))
    if z.shape[0] != cs.dims.total:
        raise ValueError(f"matrix order {z.shape[0]} does not match dims {cs.dims.dims}")
    out = z.copy()
    for w, labels, target in cs.correction_terms:
        if labels:
            out += w * marginal_correction(z, target, cs.dims, labels)
        else:
            out += w * _trace_correction(z, target)
    return hermitize(out)


def project_bipartite_affine(p, rho1, rho2) -> np.ndarray:
    """Closed-form projection onto the bipartite marginal set.

    X = P - I/n1 x (tr_1 P - rho2) - (tr_2 P - rho1) x I/n2
          + (tr P - 1)/(n1 n2) I.
    """
    p = hermitize(_as_square(p))
    r1 = np.asarray(getattr(rho1, "matrix", rho1), dtype=complex)
    r2 = np.asarray(getattr(rho2, "matrix", rho2), dtype=complex)
    n1, n2 = r1.shape[0], r2.shape[0]
    if p.shape[0] != n1 * n2:
        raise ValueError(f"matrix order {p.shape[0]} does not equal n1*n2 = {n1 * n2}")
    dims = SystemDims((n1, n2))
    tr1 = partial_trace(p, dims, (2,))
    tr2 = partial_trace(p, dims, (1,))
    out = (
        p
        - kron(np.eye(n1) / n1, tr1 - r2)
        - kron(tr2 - r1, np.eye(n2) / n2)
        + (float(np.trace(p).real) - 1.0) / (n1 * n2) * np.eye(n1 * n2)
    )
    return hermitize(out)


def project_spectrum(p, c) -> np.ndarray:
    """Nearest Hermitian matrix with the prescribed eigenvalues.

    If P = U diag(mu) U* with mu descending, the optimum for any unitary
    similarity invariant norm is U diag(c) U* with c descending.
    """
    p = _as_square(p)
    c = as_spectrum(c)
    if len(c) != p.shape[0]:
        raise ValueError(f"spectrum length {len(c)} does not match order {p.shape[0]}")
    values, u = hermitian_eig(p)
    return hermitize((u * c) @ u.conj().T)


def project_psd(z) -> np.ndarray:
    """Nearest PSD matrix: clip negative eigenvalues at zero."""
    values, u = hermitian_eig(_as_square(z))
    clipped = np.clip(values, 0.0, None)
    return hermitize((u * clipped) @ u.conj().T)
