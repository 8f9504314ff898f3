"""The ``gnormlab`` command line.

Exit codes: 0 success, 1 theorem violation (or a replay that does not
reproduce), 2 usage or configuration error, 3 I/O failure.
"""

import json
import logging

import click
from marshmallow import ValidationError

from app.environments import LOG_LEVEL
from app.exceptions import LabError
from app.lab.harness import (
    REPORT_FORMATS,
    emit_report,
    list_suites,
    load_report,
    replay,
    run_suite,
    summarize_report,
)
from app.lab.matcore import classify
from app.lab.norms import audit_grid, norm_from_singular_values
from app.lab.reports import NormKind
from app.lab.spectral import singular_values
from app.schemas import IneqReportSchema, MatrixSchema, SuiteConfigSchema

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _fail(ctx: click.Context, message: str, code: int):
    logger.error(message)
    click.echo(f'Error: {message}', err=True)
    ctx.exit(code)


def _read_json(ctx: click.Context, path: str):
    try:
        return load_report(path)
    except OSError as e:
        _fail(ctx, f'Cannot read {path}: {e}', EXIT_IO)
    except json.JSONDecodeError as e:
        _fail(ctx, f'{path} is not valid JSON: {e}', EXIT_CONFIG)


def _split(values) -> list[str]:
    return [item for value in values for item in value.split(',') if item]


@click.group()
@click.option('--log-level', default=LOG_LEVEL, show_default=True)
def cli(log_level: str):
    """Randomized audits of norm inequalities for Herglotz functions of
    matrices."""
    logging.basicConfig(
        level=log_level.upper(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )


@cli.command()
@click.option(
    '--suite',
    'suites',
    multiple=True,
    help='Suite name or "all"; repeatable, comma lists allowed.',
)
@click.option('--trials', type=int)
@click.option('--dims', help='Comma separated dimensions, e.g. 2,4,8.')
@click.option('--seed', type=int)
@click.option('--radius', 'spectrum_radius', type=float)
@click.option('--atol', type=float)
@click.option('--rtol', type=float)
@click.option('--contour-nodes', type=int)
@click.option('--angle-count', type=int)
@click.option('--format', 'report_format', type=click.Choice(REPORT_FORMATS))
@click.option('--out', 'output_path', type=click.Path(dir_okay=False))
@click.option('--workers', type=int)
@click.option('--timing/--no-timing', default=None)
@click.option(
    '--config',
    'config_path',
    type=click.Path(dir_okay=False),
    help='JSON file with the same keys; flags override it.',
)
@click.pass_context
def run(ctx: click.Context, suites, dims, config_path, **flags):
    """Run suites and emit the report."""
    settings = _read_json(ctx, config_path) if config_path else {}
    if not isinstance(settings, dict):
        _fail(ctx, 'The config file must hold a JSON object', EXIT_CONFIG)

    overrides = {key: value for key, value in flags.items() if value is not None}
    if suites:
        overrides['suites'] = _split(suites)
    if dims:
        try:
            overrides['dims'] = [int(d) for d in dims.split(',') if d]
        except ValueError:
            _fail(ctx, f'--dims must list integers, got {dims!r}', EXIT_CONFIG)

    try:
        config = SuiteConfigSchema().load({**settings, **overrides})
    except ValidationError as e:
        _fail(ctx, f'Invalid configuration: {e.messages}', EXIT_CONFIG)

    try:
        report = run_suite(config)
    except LabError as e:
        _fail(ctx, f'Run aborted: {type(e).__name__}: {e}', EXIT_CONFIG)
    try:
        text = emit_report(report)
    except OSError as e:
        _fail(ctx, f'Cannot write report: {e}', EXIT_IO)
    if not config.output_path:
        click.echo(text, nl=False)

    ctx.exit(EXIT_VIOLATION if report.theorem_violations else EXIT_OK)


@cli.command(name='replay')
@click.option('--from', 'path', required=True, type=click.Path(dir_okay=False))
@click.option('--index', type=int, default=0, show_default=True)
@click.option(
    '--witness',
    is_flag=True,
    help='Index into the named witnesses instead of the worst instances.',
)
@click.pass_context
def replay_command(ctx: click.Context, path: str, index: int, witness: bool):
    """Regenerate a stored instance and compare it bit for bit."""
    data = _read_json(ctx, path)
    if witness:
        tolerance = data.get('config', {})
        records = [
            {
                'suite': w['suite'],
                'witness': w['witness'],
                'variant': w['variant'],
                'norm_label': w['norm_label'],
                'check': w['report']['name'],
                'lhs': w['report']['lhs'],
                'rhs': w['report']['rhs'],
                'atol': tolerance.get('atol'),
                'rtol': tolerance.get('rtol'),
            }
            for w in data.get('witnesses', [])
        ]
    else:
        records = [row['worst'] for row in data.get('rows', []) if row.get('worst')]

    if not 0 <= index < len(records):
        _fail(
            ctx,
            f'Index {index} out of range ({len(records)} records)',
            EXIT_CONFIG,
        )
    record = {k: v for k, v in records[index].items() if v is not None}

    try:
        report = replay(record)
    except LabError as e:
        _fail(ctx, f'Cannot replay record {index}: {e}', EXIT_CONFIG)

    same = report.lhs == record.get('lhs') and report.rhs == record.get('rhs')
    output = IneqReportSchema().dump(report)
    output['reproduced'] = same
    click.echo(json.dumps(output, indent=2, sort_keys=True))
    if not same:
        logger.error(f'Replay of record {index} differs from the stored sides')
    ctx.exit(EXIT_OK if same else EXIT_VIOLATION)


@cli.command(name='check-matrix')
@click.option('--file', 'path', required=True, type=click.Path(dir_okay=False))
@click.option(
    '--norms',
    default='all',
    show_default=True,
    help='"all" or comma separated labels such as operator,schatten(1.5).',
)
@click.pass_context
def check_matrix(ctx: click.Context, path: str, norms: str):
    """Norms, singular values and class flags of a matrix JSON file."""
    data = _read_json(ctx, path)
    try:
        matrix = MatrixSchema().load(data)
    except ValidationError as e:
        _fail(ctx, f'Invalid matrix: {e.messages}', EXIT_CONFIG)

    try:
        if norms == 'all':
            kinds = audit_grid(min(matrix.shape))
        else:
            kinds = [
                NormKind.from_label(label)
                for label in _split_labels(norms)
            ]
    except ValueError as e:
        _fail(ctx, str(e), EXIT_CONFIG)

    values = singular_values(matrix)
    output = {
        'shape': list(matrix.shape),
        'singular_values': [float(s) for s in values],
        'norms': {
            kind.label: norm_from_singular_values(values, kind)
            for kind in kinds
        },
    }
    if matrix.is_square and matrix.rows:
        flags = classify(matrix)
        output['classification'] = {
            'hermitian': flags.hermitian,
            'normal': flags.normal,
            'unitary': flags.unitary,
            'contraction': flags.contraction,
        }
    click.echo(json.dumps(output, indent=2, sort_keys=True))


def _split_labels(text: str) -> list[str]:
    """Split on commas outside parentheses."""
    labels, depth, current = [], 0, ''
    for char in text:
        depth += {'(': 1, ')': -1}.get(char, 0)
        if char == ',' and depth == 0:
            labels.append(current)
            current = ''
        else:
            current += char
    labels.append(current)
    return [label.strip() for label in labels if label.strip()]


@cli.command()
@click.option('--from', 'path', required=True, type=click.Path(dir_okay=False))
@click.pass_context
def summarize(ctx: click.Context, path: str):
    """Per-suite totals of a CSV or JSON report."""
    try:
        summary = summarize_report(path)
    except OSError as e:
        _fail(ctx, f'Cannot read {path}: {e}', EXIT_IO)
    except (ValueError, KeyError) as e:
        _fail(ctx, f'{path} is not a suite report: {e}', EXIT_CONFIG)
    click.echo(summary.to_string(index=False))


@cli.command(name='list-suites')
def list_suites_command():
    """Registered suites, their variants and witnesses."""
    for suite in list_suites():
        variants = ', '.join(
            f'{v["name"] or "-"} ({v["mode"]})' for v in suite['variants']
        )
        click.echo(f'{suite["name"]}: {suite["description"]}')
        click.echo(f'  variants: {variants}')
        if suite['witnesses']:
            click.echo(f'  witnesses: {", ".join(suite["witnesses"])}')


def main():
    cli(prog_name='gnormlab')
