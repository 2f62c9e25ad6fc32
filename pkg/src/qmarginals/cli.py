"""Command-line front end.

Exit codes: 0 success, 1 input or validation error, 2 solver did not
converge within its iteration limit.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import constructive, fileio, solvers
from .entropy import von_neumann
from .projections import (
    ConstraintSet,
    check_consistency,
    project_marginals,
    project_psd,
    project_spectrum,
)
from .solvers import SolveOptions, SolveReport, marginal_residual
from .tensorcore import (
    as_dims,
    hermitian_eig,
    numerical_rank,
    partial_trace,
    random_density,
    random_probability_vector,
    random_unitary,
)


def _parse_dims(text: str):
    try:
        return as_dims(int(part) for part in text.split(","))
    except ValueError as exc:
        raise click.UsageError(f"--dims: {exc}") from exc


def _parse_keep(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise click.UsageError(f"bad index set {text!r}") from exc


def _load_constraints(dims, marginals):
    """Each --marginal is '<keepset>:<file>', e.g. '2,3:rho.json'."""
    if not marginals:
        raise click.UsageError("at least one --marginal is required")
    constraints = []
    for spec_text in marginals:
        keep_text, _, path = spec_text.partition(":")
        if not path:
            raise click.UsageError(
                f"--marginal {spec_text!r}: expected '<keepset>:<file>'")
        target, _target_dims = fileio.read_matrix(path)
        constraints.append((_parse_keep(keep_text), target))
    return ConstraintSet(dims, constraints)


def _echo_report(report: SolveReport) -> None:
    click.echo(f"converged: {report.converged}")
    click.echo(f"iterations: {report.iterations}")
    click.echo(f"final residual: {report.final_residual:.6e}")
    click.echo(f"wall time: {report.wall_time:.3f}s")
    if report.seed_used is not None:
        click.echo(f"seed: {report.seed_used}")
    if report.notes:
        click.echo(f"notes: {report.notes}")


def _describe_solution(x, cs) -> dict:
    values = hermitian_eig(x).values
    return {
        "rank": numerical_rank(values),
        "lambda_max": float(values[0]),
        "lambda_min": float(values[-1]),
        "entropy": von_neumann(project_psd(x)),
        "marginal_residual": marginal_residual(x, cs),
        "trace": float(np.trace(x).real),
    }


def _write_outputs(out_dir, report: SolveReport, cs, dims) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_matrix(out / "solution.json", report.solution, dims)
    summary = {
        "converged": bool(report.converged),
        "iterations": int(report.iterations),
        "final_residual": float(report.final_residual),
        "wall_time_s": float(report.wall_time),
        "seed": report.seed_used,
        "notes": report.notes,
    }
    summary.update(_describe_solution(report.solution, cs))
    (out / "report.json").write_text(json.dumps(summary, indent=1) + "\n")
    lines = ["iteration,residual"]
    lines += [f"{i + 1},{r:.17g}" for i, r in enumerate(report.residual_history)]
    (out / "history.csv").write_text("\n".join(lines) + "\n")
    click.echo(f"wrote {out / 'solution.json'}")


def _fail(message: str, code: int = 1):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


_shared = [
    click.option("--dims", "dims_text", required=True, help="subsystem dims, e.g. 2,3"),
    click.option("--marginal", "marginals", multiple=True,
                 help="prescribed marginal '<keepset>:<file>' (repeatable)"),
    click.option("--tol", type=float, default=1e-12, show_default=True),
    click.option("--max-iter", type=int, default=1000, show_default=True),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--restarts", type=int, default=1, show_default=True),
    click.option("--init", "init_text", default="random", show_default=True,
                 help="random | greedy | interlace | file:<path>"),
    click.option("--out", "out_dir", default=None, help="directory for result files"),
    click.option("--mode", type=click.Choice(["dykstra", "plain"]), default="dykstra",
                 show_default=True, help="projection onto the feasible intersection"),
]


def _with_shared(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


def _solver_options(tol, max_iter, seed, restarts, mode) -> SolveOptions:
    return SolveOptions(
        max_iterations=max_iter, tolerance=tol, seed=seed, restarts=restarts,
        dykstra_mode="with-increments" if mode == "dykstra" else "plain-alternation",
    )


def _resolve_init(init_text, cs):
    if init_text == "random":
        return None
    if init_text.startswith("file:"):
        matrix, _dims = fileio.read_matrix(init_text[5:])
        return matrix
    if init_text in ("greedy", "interlace"):
        by_keep = {c.keep: c.target for c in cs.constraints}
        if cs.dims.k != 2 or (1,) not in by_keep or (2,) not in by_keep:
            raise ValueError(f"--init {init_text} needs bipartite marginals on "
                             "subsystems 1 and 2")
        build = (constructive.greedy_minmatch if init_text == "greedy"
                 else constructive.interlace_decomposition)
        state, _decomposition = build(by_keep[(1,)], by_keep[(2,)])
        return state.matrix
    raise ValueError(f"unknown --init {init_text!r}")


@click.group()
def main():
    """Construct multipartite density matrices with prescribed marginals."""


@main.command()
@click.argument("input_file", type=click.Path())
@click.option("--keep", "keep_text", required=True, help="kept subsystems, e.g. 2,3")
@click.option("--out", "out_path", default=None)
def trace(input_file, keep_text, out_path):
    """Partial trace of a matrix file down to the kept subsystems."""
    try:
        matrix, dims = fileio.read_matrix(input_file)
        keep = dims.validate_keep(_parse_keep(keep_text))
        reduced = partial_trace(matrix, dims, keep)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if out_path:
        fileio.write_matrix(out_path, reduced, dims.local_dims(keep))
        click.echo(f"wrote {out_path}")
    else:
        click.echo(np.array2string(reduced, precision=6, suppress_small=True))


@main.command()
@click.option("--dims", "dims_text", required=True)
@click.option("--marginal", "marginals", multiple=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
def consistency(dims_text, marginals, tol):
    """Check whether the prescribed marginals can coexist."""
    try:
        cs = _load_constraints(_parse_dims(dims_text), marginals)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    report = check_consistency(cs, tol)
    click.echo(f"consistent: {report.consistent}")
    click.echo(f"max discrepancy: {report.max_discrepancy:.6e}")
    for labels, forced in sorted(report.derived_marginals.items()):
        click.echo(f"shared marginal on {set(labels)}: trace {np.trace(forced).real:.6f}")
    if not report.consistent:
        sys.exit(1)


@main.command()
@click.argument("input_file", type=click.Path())
@click.option("--dims", "dims_text", required=True)
@click.option("--marginal", "marginals", multiple=True)
@click.option("--spectrum", "spectrum_path", default=None,
              help="project onto the unitary orbit of this spectrum instead")
@click.option("--psd", "psd_flag", is_flag=True, help="project onto the PSD cone; "
              "combined with --marginal, onto the feasible intersection")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--max-iter", type=int, default=1000, show_default=True)
@click.option("--mode", type=click.Choice(["dykstra", "plain"]), default="dykstra",
              show_default=True, help="scheme for the intersection projection")
@click.option("--out", "out_path", default=None)
def project(input_file, dims_text, marginals, spectrum_path, psd_flag, tol,
            max_iter, mode, out_path):
    """Least-squares projection of a matrix file.

    With --marginal alone this is the closed-form affine projection; with
    --psd alone the eigenvalue clipping; with both, the Dykstra scheme onto
    (marginals) intersect (PSD), controlled by --mode/--tol/--max-iter.
    """
    try:
        dims = _parse_dims(dims_text)
        matrix, file_dims = fileio.read_matrix(input_file)
        if file_dims.total != dims.total:
            raise ValueError(f"matrix order {file_dims.total} does not match --dims")
        if psd_flag and marginals:
            cs = _load_constraints(dims, marginals)
            report = solvers.dykstra_project(
                matrix, cs, _solver_options(tol, max_iter, 0, 1, mode))
            _echo_report(report)
            result = report.solution
            if not report.converged:
                _fail("intersection projection did not converge", code=2)
        elif psd_flag:
            result = project_psd(matrix)
        elif spectrum_path:
            result = project_spectrum(matrix, fileio.read_spectrum(spectrum_path))
        else:
            cs = _load_constraints(dims, marginals)
            result = project_marginals(matrix, cs)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if out_path:
        fileio.write_matrix(out_path, result, dims)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(np.array2string(result, precision=6, suppress_small=True))


@main.group()
def solve():
    """Iterative solvers."""


def _run_solver(runner, dims_text, marginals, tol, max_iter, seed, restarts,
                init_text, out_dir, mode):
    try:
        dims = _parse_dims(dims_text)
        cs = _load_constraints(dims, marginals)
        consistency_report = check_consistency(cs, 1e-8)
        if not consistency_report.consistent:
            click.echo("consistent: False", err=True)
            click.echo(f"max discrepancy: {consistency_report.max_discrepancy:.6e}",
                       err=True)
            _fail("inconsistent marginals")
        opts = _solver_options(tol, max_iter, seed, restarts, mode)
        initial = _resolve_init(init_text, cs)
        report = runner(cs, opts, initial)
    except (ValueError, OSError, RuntimeError) as exc:
        _fail(str(exc))
    _echo_report(report)
    for key, value in _describe_solution(report.solution, cs).items():
        click.echo(f"{key}: {value:.6g}" if isinstance(value, float) else f"{key}: {value}")
    if out_dir:
        _write_outputs(out_dir, report, cs, cs.dims)
    if not report.converged:
        sys.exit(2)


@solve.command("spectrum")
@click.option("--spectrum", "spectrum_path", required=True)
@_with_shared
def solve_spectrum_cmd(spectrum_path, dims_text, marginals, tol, max_iter, seed,
                       restarts, init_text, out_dir, mode):
    """Find a state with the prescribed marginals and eigenvalues."""
    try:
        c = fileio.read_spectrum(spectrum_path)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    _run_solver(lambda cs, opts, initial: solvers.solve_with_spectrum(cs, c, opts, initial),
                dims_text, marginals, tol, max_iter, seed, restarts, init_text,
                out_dir, mode)


@solve.command("rank")
@click.option("--cap", type=int, required=True, help="target rank bound")
@_with_shared
def solve_rank_cmd(cap, dims_text, marginals, tol, max_iter, seed, restarts,
                   init_text, out_dir, mode):
    """Find a state with the prescribed marginals and rank at most --cap."""
    _run_solver(lambda cs, opts, initial: solvers.solve_with_rank_cap(cs, cap, opts, initial),
                dims_text, marginals, tol, max_iter, seed, restarts, init_text,
                out_dir, mode)


@solve.command("feasible")
@_with_shared
def solve_feasible_cmd(dims_text, marginals, tol, max_iter, seed, restarts,
                       init_text, out_dir, mode):
    """Find any state with the prescribed marginals."""
    _run_solver(lambda cs, opts, initial: solvers.solve_feasible(cs, opts, initial),
                dims_text, marginals, tol, max_iter, seed, restarts, init_text,
                out_dir, mode)


@solve.command("min-entropy")
@click.option("--alpha", type=float, default=None,
              help="Renyi order; omit for the von Neumann objective")
@click.option("--stationarity-tol", type=float, default=1e-8, show_default=True)
@_with_shared
def solve_entropy_cmd(alpha, stationarity_tol, dims_text, marginals, tol, max_iter,
                      seed, restarts, init_text, out_dir, mode):
    """Projected-gradient search for an entropy-extremal feasible state."""
    def runner(cs, opts, initial):
        opts = solvers.with_options(opts, nspg_stationarity_tol=stationarity_tol)
        objective = "renyi" if alpha is not None else "von-neumann"
        return solvers.nspg_minimize(cs, objective, alpha, opts, initial)

    _run_solver(runner, dims_text, marginals, tol, max_iter, seed, restarts,
                init_text, out_dir, mode)


@main.group()
def construct():
    """Direct (non-iterative) constructions from two bipartite marginals."""


def _run_construct(builder, marginals, out_dir, k=None):
    try:
        targets = {}
        for spec_text in marginals:
            keep_text, _, path = spec_text.partition(":")
            if not path:
                raise ValueError(f"--marginal {spec_text!r}: expected '<keepset>:<file>'")
            targets[_parse_keep(keep_text)] = fileio.read_matrix(path)[0]
        if set(targets) != {(1,), (2,)}:
            raise ValueError("construct needs exactly --marginal 1:<file> and "
                             "--marginal 2:<file>")
        state = builder(targets[(1,)], targets[(2,)])
        if isinstance(state, tuple):
            state = state[0]
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    cs = ConstraintSet(state.dims, [((1,), targets[(1,)]), ((2,), targets[(2,)])])
    for key, value in _describe_solution(state.matrix, cs).items():
        click.echo(f"{key}: {value:.6g}" if isinstance(value, float) else f"{key}: {value}")
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        fileio.write_matrix(out / "solution.json", state.matrix, state.dims)
        click.echo(f"wrote {out / 'solution.json'}")


@construct.command("pure")
@click.option("--marginal", "marginals", multiple=True)
@click.option("--out", "out_dir", default=None)
def construct_pure(marginals, out_dir):
    """Rank-one state from isospectral marginals."""
    _run_construct(constructive.pure_state_from_isospectral, marginals, out_dir)


@construct.command("rank-k")
@click.option("--k", "k", type=int, required=True)
@click.option("--marginal", "marginals", multiple=True)
@click.option("--out", "out_dir", default=None)
def construct_rank_k(k, marginals, out_dir):
    """Rank-k state via the roots-of-unity construction."""
    _run_construct(lambda a, b: constructive.rank_k_roots_of_unity(a, b, k),
                   marginals, out_dir)


@construct.command("sweep")
@click.option("--k", "k", type=int, required=True)
@click.option("--marginal", "marginals", multiple=True)
@click.option("--out", "out_dir", default=None)
def construct_sweep(k, marginals, out_dir):
    """Rank-k state for any admissible k up to the rank product."""
    _run_construct(lambda a, b: constructive.rank_sweep(a, b, k), marginals, out_dir)


@construct.command("interlace")
@click.option("--marginal", "marginals", multiple=True)
@click.option("--out", "out_dir", default=None)
def construct_interlace(marginals, out_dir):
    """Low-rank state via interlacing downdates."""
    _run_construct(constructive.interlace_decomposition, marginals, out_dir)


@construct.command("greedy")
@click.option("--marginal", "marginals", multiple=True)
@click.option("--out", "out_dir", default=None)
def construct_greedy(marginals, out_dir):
    """Low-rank state with maximal spectral norm via greedy min-matching."""
    _run_construct(constructive.greedy_minmatch, marginals, out_dir)


@main.command()
@click.argument("solution_file", type=click.Path())
@click.option("--dims", "dims_text", required=True)
@click.option("--marginal", "marginals", multiple=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
def verify(solution_file, dims_text, marginals, tol):
    """Re-validate an emitted solution: Hermitian, PSD, unit trace, marginals."""
    try:
        dims = _parse_dims(dims_text)
        matrix, file_dims = fileio.read_matrix(solution_file)
        if file_dims.total != dims.total:
            raise ValueError(f"matrix order {file_dims.total} does not match --dims")
        cs = _load_constraints(dims, marginals)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    values = hermitian_eig(matrix).values
    checks = {
        "hermitian": True,  # read_matrix enforces it
        "psd": bool(values[-1] >= -1e-10),
        "unit_trace": bool(abs(float(np.trace(matrix).real) - 1.0) <= max(tol, 1e-10)),
        "marginals": bool(marginal_residual(matrix, cs) <= tol),
    }
    for name, ok in checks.items():
        click.echo(f"{name}: {'ok' if ok else 'FAIL'}")
    if not all(checks.values()):
        sys.exit(1)
    click.echo("solution verified")


@main.group(name="random")
def random_group():
    """Seeded random test objects."""


@random_group.command("unitary")
@click.option("--dims", "dims_text", required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", default=None)
def random_unitary_cmd(dims_text, seed, out_path):
    """Haar-random unitary of order prod(dims)."""
    dims = _parse_dims(dims_text)
    u = random_unitary(dims.total, seed)
    if out_path:
        # unitaries are not Hermitian, so bypass the matrix-file validation
        payload = {"dims": list(dims.dims),
                   "entries": [[float(z.real), float(z.imag)] for z in u.ravel()]}
        Path(out_path).write_text(json.dumps(payload, indent=1) + "\n")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(np.array2string(u, precision=6, suppress_small=True))


@random_group.command("density")
@click.option("--dims", "dims_text", required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", default=None)
def random_density_cmd(dims_text, seed, out_path):
    """Random density matrix (Haar basis, flat-Dirichlet spectrum)."""
    dims = _parse_dims(dims_text)
    rho = random_density(dims, seed)
    if out_path:
        fileio.write_matrix(out_path, rho.matrix, dims)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(np.array2string(rho.matrix, precision=6, suppress_small=True))


@random_group.command("probvec")
@click.option("--dims", "dims_text", required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", default=None)
def random_probvec_cmd(dims_text, seed, out_path):
    """Random probability vector of length prod(dims), sorted descending."""
    dims = _parse_dims(dims_text)
    p = random_probability_vector(dims.total, seed)
    if out_path:
        fileio.write_spectrum(out_path, p)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(np.array2string(p, precision=6))


if __name__ == "__main__":
    main()
