"""Iterative schemes: alternating projections, Dykstra, and projected gradient.

Every solver runs from a seeded random start (or an explicit initial
matrix), records one marginal residual per sweep, and returns a SolveReport.
Identical seeds and options reproduce bit-identical reports. Non-convergence
within the iteration limit is reported, not raised: for a prescribed
spectrum it may simply mean the instance is infeasible.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from . import entropy as _entropy
from .projections import ConstraintSet, project_marginals, project_psd, project_spectrum
from .tensorcore import (
    as_spectrum,
    hermitian_eig,
    hermitize,
    partial_trace,
    random_density,
    _as_square,
)


@dataclass(frozen=True)
class SolveOptions:
    """Iteration limits, tolerances, and scheme parameters shared by the solvers."""

    max_iterations: int = 1000
    tolerance: float = 1e-12
    seed: int = 0
    restarts: int = 1
    dykstra_mode: str = "with-increments"   # or "plain-alternation"
    nspg_window: int = 10
    nspg_decrease: float = 1e-4
    nspg_sigma1: float = 0.1
    nspg_sigma2: float = 0.9
    nspg_alpha_min: float = 1e-10
    nspg_alpha_max: float = 1e10
    nspg_stationarity_tol: float = 1e-8

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.dykstra_mode not in ("with-increments", "plain-alternation"):
            raise ValueError(f"unknown dykstra_mode {self.dykstra_mode!r}")
        if not 0 < self.nspg_sigma1 < self.nspg_sigma2 < 1:
            raise ValueError("need 0 < sigma1 < sigma2 < 1")
        if not 0 < self.nspg_alpha_min < self.nspg_alpha_max:
            raise ValueError("need 0 < alpha_min < alpha_max")
        if self.nspg_window < 1:
            raise ValueError("window must be >= 1")


@dataclass
class SolveReport:
    solution: np.ndarray
    iterations: int
    residual_history: np.ndarray
    converged: bool
    wall_time: float
    final_residual: float
    seed_used: int | None = None
    objective_history: np.ndarray | None = None
    notes: str = ""


def marginal_residual(x, cs: ConstraintSet) -> float:
    """Err(X) = sum_i ||tr_{J_i^c}(X) - sigma_i||_F."""
    x = _as_square(x)
    return float(sum(
        np.linalg.norm(partial_trace(x, cs.dims, c.keep) - c.target)
        for c in cs.constraints
    ))


def _initial_point(cs: ConstraintSet, seed: int, initial) -> np.ndarray:
    if initial is not None:
        m = hermitize(_as_square(initial, "initial point"))
        if m.shape[0] != cs.dims.total:
            raise ValueError(
                f"initial point order {m.shape[0]} does not match dims {cs.dims.dims}"
            )
        return m
    return np.array(random_density(cs.dims, seed).matrix)


def _restart_seeds(opts: SolveOptions):
    return [opts.seed + i for i in range(opts.restarts)]


def _pick_best(reports: list[SolveReport]) -> SolveReport:
    for r in reports:
        if r.converged:
            return r
    return min(reports, key=lambda r: r.final_residual)


def _sweep_solver(cs, opts, initial, sweep, entry_ok=None) -> SolveReport:
    """Common driver: alternate `sweep` until Err < tolerance."""
    t0 = time.perf_counter()
    reports = []
    for i, seed in enumerate(_restart_seeds(opts)):
        x = _initial_point(cs, seed, initial if i == 0 else None)
        err0 = marginal_residual(x, cs)
        if err0 < opts.tolerance and (entry_ok is None or entry_ok(x)):
            reports.append(SolveReport(
                solution=x, iterations=0, residual_history=np.empty(0),
                converged=True, wall_time=0.0, final_residual=err0, seed_used=seed,
            ))
            break
        history = []
        converged = False
        state = None
        for _ in range(opts.max_iterations):
            x, state = sweep(x, state)
            err = marginal_residual(x, cs)
            history.append(err)
            if err < opts.tolerance:
                converged = True
                break
        reports.append(SolveReport(
            solution=x, iterations=len(history),
            residual_history=np.asarray(history), converged=converged,
            wall_time=0.0, final_residual=history[-1] if history else err0,
            seed_used=seed,
        ))
        if converged:
            break
    best = _pick_best(reports)
    best.wall_time = time.perf_counter() - t0
    return best


def solve_with_spectrum(cs: ConstraintSet, c, opts: SolveOptions | None = None,
                        initial=None) -> SolveReport:
    """Alternating projections between the marginal set and a fixed spectrum.

    Iterates X -> Phi_spectrum(Phi_marginals(X)); on convergence the solution
    carries the prescribed eigenvalues exactly (final projection) and meets
    every marginal within the tolerance.
    """
    opts = opts or SolveOptions()
    c = as_spectrum(c, probability=True)
    if len(c) != cs.dims.total:
        raise ValueError(f"spectrum length {len(c)} does not match total dim {cs.dims.total}")
    cs.correction_terms  # validates consistency up front

    def sweep(x, _state):
        return project_spectrum(project_marginals(x, cs), c), None

    def entry_ok(x):
        return bool(np.max(np.abs(hermitian_eig(x).values - c)) <= 1e-8)

    return _sweep_solver(cs, opts, initial, sweep, entry_ok)


def solve_with_rank_cap(cs: ConstraintSet, r: int, opts: SolveOptions | None = None,
                        initial=None) -> SolveReport:
    """Alternating projections between the marginal set and rank <= r.

    The rank step keeps the top-r eigenvalues clipped at zero, without
    renormalizing the trace (the next affine projection restores it).
    Convergence is not guaranteed; a non-converged report is a signal, not a
    proof, that no rank-r solution exists.
    """
    opts = opts or SolveOptions()
    if r < 1:
        raise ValueError("rank cap must be >= 1")
    cs.correction_terms

    def sweep(x, _state):
        y = project_marginals(x, cs)
        values, u = hermitian_eig(y)
        s = np.clip(values, 0.0, None)
        s[r:] = 0.0
        return hermitize((u * s) @ u.conj().T), None

    def entry_ok(x):
        values = hermitian_eig(x).values
        return bool(values[0] >= -1e-12 and (len(values) <= r or
                                             np.all(values[r:] <= 1e-12)))

    return _sweep_solver(cs, opts, initial, sweep, entry_ok)


def solve_feasible(cs: ConstraintSet, opts: SolveOptions | None = None,
                   initial=None) -> SolveReport:
    """Plain alternation between the marginal set and the PSD cone.

    Finds some state with the prescribed marginals, starting from a seeded
    random density matrix.
    """
    opts = opts or SolveOptions()
    cs.correction_terms

    def sweep(x, _state):
        return project_psd(project_marginals(x, cs)), None

    def entry_ok(x):
        return bool(np.linalg.eigvalsh(x)[0] >= -1e-12)

    return _sweep_solver(cs, opts, initial, sweep, entry_ok)


def dykstra_project(z, cs: ConstraintSet, opts: SolveOptions | None = None) -> SolveReport:
    """Project z onto (marginal set) intersect (PSD cone).

    In "with-increments" mode the PSD leg carries Dykstra's correction term
    (the affine leg needs none), and the limit is the Frobenius projection of
    z. "plain-alternation" replays the bare alternation instead, whose limit
    is some point of the intersection, generally not the projection.
    """
    opts = opts or SolveOptions()
    cs.correction_terms
    z = hermitize(_as_square(z))
    t0 = time.perf_counter()
    x, history, converged = _dykstra_loop(
        z, cs, opts.dykstra_mode, opts.max_iterations, err_tol=opts.tolerance,
    )
    err0 = marginal_residual(z, cs)
    return SolveReport(
        solution=x, iterations=len(history), residual_history=np.asarray(history),
        converged=converged, wall_time=time.perf_counter() - t0,
        final_residual=history[-1] if history else err0, seed_used=None,
    )


def _dykstra_loop(z, cs, mode, max_sweeps, err_tol=0.0, change_tol=0.0):
    """Shared Dykstra iteration; stops on Err < err_tol or sweep change < change_tol."""
    x = z
    increment = np.zeros_like(z)
    history = []
    converged = False
    with_increments = mode == "with-increments"
    track_err = err_tol > 0.0
    for _ in range(max_sweeps):
        x_prev = x
        y = project_marginals(x, cs)
        if with_increments:
            t = y + increment
            x = project_psd(t)
            increment = t - x
        else:
            x = project_psd(y)
        if track_err:
            err = marginal_residual(x, cs)
            history.append(err)
            if err < err_tol:
                converged = True
                break
        if change_tol and np.linalg.norm(x - x_prev) <= change_tol:
            converged = True
            break
    return x, history, converged


def _objective_and_gradient(kind: str, alpha: float | None):
    # Internal objective is the negative entropy, so descent drives the
    # iterates toward the prescribed extremum convention of the report.
    if kind == "von-neumann":
        def f(values):
            v = np.clip(values, 0.0, None)
            v = v[v > 0.0]
            return float((v * np.log(v)).sum()) if v.size else 0.0

        def grad(values, u):
            g = np.log(np.clip(values, _entropy.LOG_FLOOR, None)) + 1.0
            return hermitize((u * g) @ u.conj().T)

        return f, grad
    if kind == "renyi":
        if alpha is None or alpha <= 0 or alpha == 1:
            raise ValueError("renyi objective needs alpha > 0, alpha != 1")

        def f(values):
            v = np.clip(values, _entropy.LOG_FLOOR, None)
            return float(np.log(np.sum(v ** alpha)) / (alpha - 1.0))

        def grad(values, u):
            v = np.clip(values, _entropy.LOG_FLOOR, None)
            scale = alpha / ((alpha - 1.0) * float(np.sum(v ** alpha)))
            return hermitize(scale * (u * (v ** (alpha - 1.0))) @ u.conj().T)

        return f, grad
    raise ValueError(f"unknown objective {kind!r}; use 'von-neumann' or 'renyi'")


def nspg_minimize(cs: ConstraintSet, objective: str = "von-neumann",
                  alpha: float | None = None, opts: SolveOptions | None = None,
                  initial=None) -> SolveReport:
    """Nonmonotone spectral projected gradient over (marginals) intersect (PSD).

    Minimizes tr(rho ln rho) (or the matching Renyi-form objective) with a
    windowed Armijo acceptance rule and Barzilai-Borwein step sizes. The
    inner projection is Dykstra with increments, so search directions are
    actual projections and stay feasible. Stops when
    ||Phi(rho - grad f(rho)) - rho||_F falls below the stationarity
    tolerance; the residual history records that measure per iteration.
    """
    opts = opts or SolveOptions()
    cs.correction_terms
    f_of, grad_of = _objective_and_gradient(objective, alpha)
    t0 = time.perf_counter()

    def inner_project(m, cap=5000):
        # Capped: early iterates with singular spectra push the clipped
        # gradient far from the cone, where Dykstra slows down. Inexact early
        # projections only blunt the search direction; the stationarity
        # certificate fires near the interior optimum, where the projection
        # converges in a handful of sweeps.
        x, _hist, _ok = _dykstra_loop(
            hermitize(m), cs, "with-increments", cap, change_tol=1e-14,
        )
        return x

    start = _initial_point(cs, opts.seed, initial)
    rho = inner_project(start)

    values, u = hermitian_eig(rho)
    f_cur = f_of(values)
    window = deque([f_cur], maxlen=opts.nspg_window)
    step = 1.0
    station_history = []
    objective_history = [f_cur]
    converged = False
    notes = ""
    stalls = 0
    eps = np.finfo(float).eps
    for _ in range(opts.max_iterations):
        g = grad_of(values, u)
        station = float(np.linalg.norm(inner_project(rho - g) - rho))
        station_history.append(station)
        if station <= opts.nspg_stationarity_tol:
            converged = True
            break
        d = inner_project(rho - step * g) - rho
        slope = float(np.real(np.trace(d.conj().T @ g)))
        f_ref = max(window)
        # below this band the directional derivative is indistinguishable
        # from the floating-point resolution of the objective
        band = 64 * eps * max(1.0, abs(f_ref))
        unverified = abs(slope) <= band
        collapsed = False
        if unverified:
            # noise-scale slope: take the unit step unchecked (it is a
            # projected gradient step, non-ascent up to that same noise) and
            # leave the calibrated step size alone
            candidate = hermitize(rho + d)
            cand_values, cand_u = hermitian_eig(candidate)
            f_new = f_of(cand_values)
        elif slope > 0:
            collapsed = True   # genuinely ascending: projection too inexact
        else:
            lam = 1.0
            while True:
                candidate = hermitize(rho + lam * d)
                cand_values, cand_u = hermitian_eig(candidate)
                f_new = f_of(cand_values)
                if f_new <= f_ref + opts.nspg_decrease * lam * slope:
                    break
                lam = (opts.nspg_sigma1 * lam + opts.nspg_sigma2 * lam) / 2
                if lam < 1e-16:
                    collapsed = True
                    break
        if collapsed:
            stalls += 1
            step = 1.0
            if stalls > 5:
                notes = "stationarity stalled at floating-point resolution"
                break
            continue
        stalls = 0
        if not unverified:
            s = candidate - rho
            g_new = grad_of(cand_values, cand_u)
            b = float(np.real(np.trace(s.conj().T @ (g_new - g))))
            if b <= 0:
                step = opts.nspg_alpha_max
            else:
                a = float(np.real(np.trace(s.conj().T @ s)))
                step = min(opts.nspg_alpha_max, max(opts.nspg_alpha_min, a / b))
        rho, values, u, f_cur = candidate, cand_values, cand_u, f_new
        window.append(f_cur)
        objective_history.append(f_cur)

    return SolveReport(
        solution=rho, iterations=len(station_history),
        residual_history=np.asarray(station_history), converged=converged,
        wall_time=time.perf_counter() - t0,
        final_residual=station_history[-1] if station_history else 0.0,
        seed_used=opts.seed, objective_history=np.asarray(objective_history),
        notes=notes,
    )


def with_options(opts: SolveOptions | None = None, **changes) -> SolveOptions:
    """Copy of `opts` (or the defaults) with the given fields replaced."""
    return replace(opts or SolveOptions(), **changes)
