import json

import pytest

from app.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_VIOLATION, cli
from app.exceptions import ConvergenceError


def run_args(out, *extra):
    return [
        'run', '--suite', 'thm25,dadar', '--trials', '2', '--dims', '2,3',
        '--seed', '7', '--out', str(out), *extra,
    ]


def test_list_suites(runner):
    result = runner.invoke(cli, ['list-suites'])
    assert result.exit_code == EXIT_OK
    assert 'pos_multiplier:' in result.output
    assert 'stated-plus (recording)' in result.output


def test_run_writes_identical_reports(runner, tmp_path):
    first, second = tmp_path / 'a.json', tmp_path / 'b.json'
    assert runner.invoke(cli, run_args(first)).exit_code == EXIT_OK
    assert runner.invoke(cli, run_args(second, '--workers', '2')).exit_code == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    data = json.loads(first.read_text())
    assert data['config']['seed'] == 7
    assert data['summary']['theorem_violations'] == 0


def test_run_csv(runner, tmp_path):
    out = tmp_path / 'report.csv'
    result = runner.invoke(cli, run_args(out, '--format', 'csv'))
    assert result.exit_code == EXIT_OK
    assert out.read_text().splitlines()[0] == (
        'name,norm,trials,violations,min_slack,mean_slack,mode'
    )


def test_run_reads_config_file(runner, tmp_path):
    config = tmp_path / 'config.json'
    config.write_text(json.dumps({'suites': ['cor_ref'], 'trials': 1, 'dims': [2]}))
    out = tmp_path / 'report.json'
    result = runner.invoke(
        cli, ['run', '--config', str(config), '--seed', '3', '--out', str(out)]
    )
    assert result.exit_code == EXIT_OK
    data = json.loads(out.read_text())
    assert data['config']['suites'] == ['cor_ref']
    assert data['config']['seed'] == 3


@pytest.mark.parametrize(
    'args',
    [
        ['--trials', '0'],
        ['--suite', 'no_such_suite'],
        ['--dims', '2,x'],
        ['--radius', '1.2'],
    ],
)
def test_run_configuration_errors(runner, tmp_path, args):
    result = runner.invoke(cli, ['run', *args, '--out', str(tmp_path / 'r.json')])
    assert result.exit_code == EXIT_CONFIG


def test_run_maps_lab_errors_to_config_exit(runner, tmp_path, monkeypatch):
    def diverge(config):
        raise ConvergenceError('SVD did not converge in 30 sweeps')

    monkeypatch.setattr('app.cli.run_suite', diverge)
    result = runner.invoke(cli, run_args(tmp_path / 'r.json'))
    assert result.exit_code == EXIT_CONFIG
    assert 'ConvergenceError' in result.output
    assert not (tmp_path / 'r.json').exists()


def test_run_io_errors(runner, tmp_path):
    out = tmp_path / 'missing' / 'report.json'
    result = runner.invoke(cli, run_args(out))
    assert result.exit_code == EXIT_IO

    result = runner.invoke(
        cli, ['run', '--config', str(tmp_path / 'none.json')]
    )
    assert result.exit_code == EXIT_IO


def test_recording_suite_does_not_fail_the_run(runner, tmp_path):
    out = tmp_path / 'report.json'
    result = runner.invoke(
        cli,
        ['run', '--suite', 'pos_multiplier', '--trials', '1', '--dims', '2',
         '--out', str(out)],
    )
    assert result.exit_code == EXIT_OK
    data = json.loads(out.read_text())
    assert data['summary']['recording_violations'] >= 0
    assert data['summary']['theorem_violations'] == 0


def test_replay(runner, tmp_path):
    out = tmp_path / 'report.json'
    runner.invoke(cli, run_args(out))

    result = runner.invoke(cli, ['replay', '--from', str(out), '--index', '1'])
    assert result.exit_code == EXIT_OK
    assert json.loads(result.output)['reproduced'] is True

    result = runner.invoke(cli, ['replay', '--from', str(out), '--witness'])
    assert result.exit_code == EXIT_OK

    result = runner.invoke(cli, ['replay', '--from', str(out), '--index', '999'])
    assert result.exit_code == EXIT_CONFIG


def test_replay_detects_tampering(runner, tmp_path):
    out = tmp_path / 'report.json'
    runner.invoke(cli, run_args(out))
    data = json.loads(out.read_text())
    data['rows'][0]['worst']['lhs'] += 1.0
    out.write_text(json.dumps(data))

    result = runner.invoke(cli, ['replay', '--from', str(out)])
    assert result.exit_code == EXIT_VIOLATION
    assert json.loads(result.output)['reproduced'] is False


def test_replay_missing_file(runner, tmp_path):
    result = runner.invoke(cli, ['replay', '--from', str(tmp_path / 'none.json')])
    assert result.exit_code == EXIT_IO


def test_check_matrix(runner, tmp_path):
    path = tmp_path / 'matrix.json'
    path.write_text(
        json.dumps({'rows': 2, 'cols': 2, 'entries': [[3, 0], [0, 0], [0, 0], [4, 0]]})
    )
    result = runner.invoke(
        cli,
        ['check-matrix', '--file', str(path), '--norms', 'operator,schatten(1.5),kyfan(2)'],
    )
    assert result.exit_code == EXIT_OK
    data = json.loads(result.output)
    assert set(data['norms']) == {'operator', 'schatten(1.5)', 'kyfan(2)'}
    assert data['norms']['kyfan(2)'] == pytest.approx(7)
    assert data['classification']['hermitian'] is True

    result = runner.invoke(
        cli, ['check-matrix', '--file', str(path), '--norms', 'frobenius']
    )
    assert result.exit_code == EXIT_CONFIG


def test_check_matrix_rejects_bad_file(runner, tmp_path):
    path = tmp_path / 'matrix.json'
    path.write_text(json.dumps({'rows': 2, 'cols': 2, 'entries': []}))
    result = runner.invoke(cli, ['check-matrix', '--file', str(path)])
    assert result.exit_code == EXIT_CONFIG

    path.write_text('{not json')
    result = runner.invoke(cli, ['check-matrix', '--file', str(path)])
    assert result.exit_code == EXIT_CONFIG


def test_summarize(runner, tmp_path):
    out = tmp_path / 'report.csv'
    runner.invoke(cli, run_args(out, '--format', 'csv'))
    result = runner.invoke(cli, ['summarize', '--from', str(out)])
    assert result.exit_code == EXIT_OK
    assert 'thm25' in result.output and 'dadar' in result.output

    result = runner.invoke(cli, ['summarize', '--from', str(tmp_path / 'x.csv')])
    assert result.exit_code == EXIT_IO
