import functools
import json
import logging
import sys

import click

from errors import ConfigError, InvalidOrderError, PencilkError, SingularPencilError
from models import OutputFormat, RunConfig
from services.compound import kcompound
from services.dae import DaeService, make_system
from services.drazin import DrazinService
from services.pencil import PencilService, make_pencil
from tasks.examples import run_example
from utils import chop, format_matrix_csv, matrix_to_file_dict, read_matrix, read_vector, scalar_to_json, write_csv

logger = logging.getLogger(__name__)


def handle_errors(f):
    """Log library errors on stderr and exit with their code"""
    @functools.wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except PencilkError as e:
            logger.error(f'{type(e).__name__}: {str(e)}')
            if e.diagnostics:
                logger.debug(f'diagnostics: {e.diagnostics}')
            sys.exit(e.exit_code)
    return decorated_function


def _parse_shifts(values):
    shifts = []
    for value in values:
        try:
            shifts.append(complex(value.replace(' ', '')))
        except ValueError:
            raise ConfigError(f'--shift {value!r} is not a number') from None
    return shifts or None


def run_options(f):
    """Tolerance and output flags shared by every analysis command"""
    options = [
        click.option('--tol-rank', type=float, default=None, help='Relative rank threshold.'),
        click.option('--tol-residual', type=float, default=None, help='Residual tolerance of propagation.'),
        click.option('--tol-consistency', type=float, default=None,
                     help='Relative distance from the consistency subspace still accepted.'),
        click.option('--stability-margin', type=float, default=None, help='Band around the unit circle.'),
        click.option('--precision', type=int, default=None, help='Significant digits in the output.'),
        click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default=None),
        click.option('--shift', 'shift', multiple=True, help='Replace the shift ladder (repeatable).'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def build_run_config(tol_rank, tol_residual, tol_consistency, stability_margin, precision, fmt, shift,
                     default_format=None) -> RunConfig:
    return RunConfig.from_config(
        rank_tol=tol_rank,
        residual_tol=tol_residual,
        consistency_tol=tol_consistency,
        stability_margin=stability_margin,
        precision=precision,
        output_format=fmt or default_format,
        shifts=_parse_shifts(shift),
    )


def build_services(run: RunConfig):
    pencils = PencilService(shifts=run.shifts)
    drazin = DrazinService(rank_rtol=run.rank_tol)
    dae = DaeService(pencils, drazin,
                     residual_tol=run.residual_tol,
                     consistency_tol=run.consistency_tol,
                     stability_margin=run.stability_margin)
    return pencils, drazin, dae


def emit_json(payload):
    click.echo(json.dumps(payload))


def _matrix_json(a, run: RunConfig):
    return matrix_to_file_dict(chop(a), run.precision)


def _eig_json(eigs, run: RunConfig):
    return [{
        'alpha': scalar_to_json(e.alpha, run.precision),
        'beta': scalar_to_json(e.beta, run.precision),
        'lambda': e.display(run.precision),
    } for e in eigs]


def _vector_json(v, run: RunConfig):
    return [scalar_to_json(z, run.precision) for z in chop(v)]


def _tuple_label(t):
    return '-'.join(str(i) for i in t)


@click.command('compound')
@click.argument('matrix_path', type=click.Path())
@click.option('--k', 'k', type=int, required=True, help='Compound order.')
@run_options
@handle_errors
def compound_command(matrix_path, k, **flags):
    """Print the k-multiplicative compound of a matrix."""
    run = build_run_config(**flags)
    result = kcompound(read_matrix(matrix_path), k)
    if run.output_format is OutputFormat.CSV:
        header = ['row'] + [_tuple_label(t) for t in result.col_index]
        cells = format_matrix_csv(chop(result.matrix), run.precision)
        rows = [[_tuple_label(t)] + row for t, row in zip(result.row_index, cells)]
        write_csv(sys.stdout, header, rows, run.precision)
        return
    emit_json(_matrix_json(result.matrix, run))


@click.command('pencil-eig')
@click.argument('a_path', type=click.Path())
@click.argument('b_path', type=click.Path())
@click.option('--k', 'k', type=int, default=None, help='Also list the k-compound pencil spectrum.')
@run_options
@handle_errors
def pencil_eig_command(a_path, b_path, k, **flags):
    """List generalized eigenvalues of A - lambda B."""
    run = build_run_config(**flags)
    pencils, _, _ = build_services(run)
    p = make_pencil(read_matrix(a_path), read_matrix(b_path))
    report = pencils.is_regular(p)
    if not report.regular:
        raise SingularPencilError(
            f'singular pencil: A - lambda B is rank deficient at all {report.shifts_tried} shifts',
            {'common_kernel_vector': report.common_kernel_vector})
    eigs = pencils.generalized_eigenvalues(p)

    compound_part = None
    if k is not None:
        if k == 1:
            compound_part = {'k': 1, 'regular': True, 'eigenvalues': eigs}
        else:
            compound_report = pencils.compound_regularity(p, k)
            compound_part = {'k': k, 'regular': compound_report.regular}
            if compound_report.regular:
                compound_part['eigenvalues'] = pencils.generalized_eigenvalues(pencils.kcompound_pencil(p, k))
            else:
                compound_part['kernel_witness'] = compound_report.common_kernel_vector

    if run.output_format is OutputFormat.CSV:
        rows = [['base', e.alpha, e.beta, e.display(run.precision)] for e in eigs]
        if compound_part is not None:
            label = f'k={compound_part["k"]}'
            rows += [[label, e.alpha, e.beta, e.display(run.precision)]
                     for e in compound_part.get('eigenvalues', [])]
        write_csv(sys.stdout, ['pencil', 'alpha', 'beta', 'lambda'], rows, run.precision)
        return

    payload = {
        'regular': True,
        'witness_shift': scalar_to_json(report.witness_lambda, run.precision),
        'eigenvalues': _eig_json(eigs, run),
    }
    if compound_part is not None:
        if 'eigenvalues' in compound_part:
            compound_part['eigenvalues'] = _eig_json(compound_part['eigenvalues'], run)
        if 'kernel_witness' in compound_part:
            compound_part['kernel_witness'] = _vector_json(compound_part['kernel_witness'], run)
        payload['compound'] = compound_part
    emit_json(payload)


@click.command('drazin')
@click.argument('matrix_path', type=click.Path())
@run_options
@handle_errors
def drazin_command(matrix_path, **flags):
    """Print the Drazin index and Drazin inverse of a square matrix."""
    run = build_run_config(**flags)
    _, drazin, _ = build_services(run)
    result = drazin.drazin_inverse(read_matrix(matrix_path))
    if run.output_format is OutputFormat.CSV:
        n = result.inverse.shape[0]
        rows = [[result.index] + list(row) for row in chop(result.inverse)]
        write_csv(sys.stdout, ['index'] + [f'c{j}' for j in range(1, n + 1)], rows, run.precision)
        return
    emit_json({
        'index': result.index,
        'rank_sequence': result.rank_sequence,
        'inverse': _matrix_json(result.inverse, run),
    })


@click.command('dae-analyze')
@click.argument('a_path', type=click.Path())
@click.argument('b_path', type=click.Path())
@click.option('--k', 'k', type=int, default=None, help='Also analyze the k-compound system.')
@run_options
@handle_errors
def dae_analyze_command(a_path, b_path, k, **flags):
    """Tractability, consistency subspace and stability of B x(j+1) = A x(j)."""
    run = build_run_config(**flags)
    pencils, _, dae = build_services(run)
    sys_ = make_system(read_matrix(a_path), read_matrix(b_path))
    analysis = dae.analyze(sys_, run.shifts)
    dae.require_tractable(analysis)
    payload = _analysis_json(analysis, run)

    if k is not None and k > 1:
        if k > sys_.dimension:
            raise InvalidOrderError(f'order k={k} outside 1..{sys_.dimension}')
        report = pencils.compound_regularity(sys_.pencil(), k)
        if report.regular:
            compound_result = dae.compound_analysis(sys_, k, run.shifts)
            payload['compound'] = dict(_analysis_json(compound_result, run), k=k, regular=True)
        else:
            payload['compound'] = {
                'k': k,
                'regular': False,
                'kernel_witness': _vector_json(report.common_kernel_vector, run),
            }
    emit_json(payload)


def _analysis_json(analysis, run: RunConfig) -> dict:
    return {
        'tractable': analysis.tractable,
        'shift': scalar_to_json(analysis.shift_lambda, run.precision),
        'drazin_index': analysis.drazin_index,
        'consistency_dim': analysis.consistency_dim,
        'finite_eigenvalues': _eig_json(analysis.finite_eigs, run),
        'infinite_count': analysis.infinite_count,
        'verdict': analysis.verdict.value,
        'b_hat_nilpotent': analysis.b_hat_nilpotent,
        'b_hat': _matrix_json(analysis.b_hat, run),
    }


@click.command('dae-solve')
@click.argument('a_path', type=click.Path())
@click.argument('b_path', type=click.Path())
@click.argument('x0_path', type=click.Path())
@click.option('--steps', type=int, required=True, help='Number of steps N.')
@run_options
@handle_errors
def dae_solve_command(a_path, b_path, x0_path, steps, **flags):
    """Propagate a consistent initial condition for N steps."""
    run = build_run_config(default_format='csv', **flags)
    _, _, dae = build_services(run)
    if steps < 0:
        raise ConfigError(f'--steps must be non-negative, got {steps}')
    sys_ = make_system(read_matrix(a_path), read_matrix(b_path))
    x0 = read_vector(x0_path, sys_.dimension)
    trajectory = dae.propagate(_tractable(dae, sys_, run), x0, steps)

    residuals = [0.0] + trajectory.residuals
    if run.output_format is OutputFormat.JSON:
        emit_json({
            'j': trajectory.times,
            'states': [_vector_json(x, run) for x in trajectory.states],
            'residuals': [scalar_to_json(r, run.precision) for r in residuals],
        })
        return
    n = sys_.dimension
    rows = [[j] + list(chop(x)) + [r] for j, x, r in zip(trajectory.times, trajectory.states, residuals)]
    write_csv(sys.stdout, ['j'] + [f'x_{i}' for i in range(1, n + 1)] + ['residual'], rows, run.precision)


@click.command('dae-volume')
@click.argument('a_path', type=click.Path())
@click.argument('b_path', type=click.Path())
@click.argument('x0cols_path', type=click.Path())
@click.option('--k', 'k', type=int, default=None, help='Number of initial columns.')
@click.option('--steps', type=int, required=True, help='Number of steps N.')
@run_options
@handle_errors
def dae_volume_command(a_path, b_path, x0cols_path, k, steps, **flags):
    """Track the volume spanned by k solutions through the k-compound system."""
    run = build_run_config(default_format='csv', **flags)
    _, _, dae = build_services(run)
    if steps < 0:
        raise ConfigError(f'--steps must be non-negative, got {steps}')
    sys_ = make_system(read_matrix(a_path), read_matrix(b_path))
    columns = read_matrix(x0cols_path)
    if k is not None and k != columns.shape[1]:
        raise InvalidOrderError(f'--k {k} but the file holds {columns.shape[1]} columns')
    trace = dae.volume_trace(sys_, columns, steps, _tractable(dae, sys_, run))

    residuals = [0.0] + trace.compound_residuals
    if run.output_format is OutputFormat.JSON:
        emit_json({
            'k': trace.k,
            'j': list(range(steps + 1)),
            'compound_states': [_vector_json(y, run) for y in trace.compound_states],
            'volumes': [scalar_to_json(v, run.precision) for v in trace.volumes],
            'residuals': [scalar_to_json(r, run.precision) for r in residuals],
        })
        return
    width = len(trace.compound_states[0])
    rows = [[j] + list(chop(y)) + [v, r]
            for j, (y, v, r) in enumerate(zip(trace.compound_states, trace.volumes, residuals))]
    write_csv(sys.stdout, ['j'] + [f'y_{i}' for i in range(1, width + 1)] + ['volume', 'residual'],
              rows, run.precision)


def _tractable(dae: DaeService, sys_, run: RunConfig):
    analysis = dae.analyze(sys_, run.shifts)
    dae.require_tractable(analysis)
    return analysis


@click.command('examples')
@click.argument('name')
@click.option('--out', 'out_dir', type=click.Path(), default=None, help='Output folder for CSV files.')
@click.option('--precision', type=int, default=None, help='Significant digits in the output.')
@handle_errors
def examples_command(name, out_dir, precision):
    """Reproduce a worked example: periodic, leslie or singular."""
    run = RunConfig.from_config(precision=precision)
    summary = run_example(name, out_dir, precision=run.precision)
    emit_json(summary)


commands = [
    compound_command,
    pencil_eig_command,
    drazin_command,
    dae_analyze_command,
    dae_solve_command,
    dae_volume_command,
    examples_command,
]
