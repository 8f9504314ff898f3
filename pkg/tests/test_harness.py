import json

import pandas as pd
import pytest
from marshmallow import ValidationError

from app.exceptions import ConfigError
from app.lab import ineq
from app.lab.harness import (
    CSV_COLUMNS,
    SUITES,
    SUMMARY_COLUMNS,
    SuiteConfig,
    emit_report,
    list_suites,
    render_report,
    replay,
    report_data,
    run_suite,
    summarize_report,
)
from app.schemas import SuiteConfigSchema

# Shared small configuration; every test narrows the suites it needs.
SMALL = {'trials': 2, 'dims': (2, 3), 'seed': 11}


@pytest.mark.parametrize(
    'kwargs',
    [
        {'trials': 0},
        {'dims': ()},
        {'dims': (0, 2)},
        {'seed': -1},
        {'spectrum_radius': 1.0},
        {'atol': -1e-10},
        {'contour_nodes': 0},
        {'workers': 0},
        {'report_format': 'xml'},
        {'suites': ('no_such_suite',)},
        {'suites': ()},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        SuiteConfig(**kwargs)


def test_config_schema_defaults_and_errors():
    config = SuiteConfigSchema().load({'suites': ['thm25'], 'dims': [1]})
    assert isinstance(config, SuiteConfig)
    assert config.suites == ('thm25',)
    assert config.dims == (1,)
    assert config.tolerance.atol == pytest.approx(1e-10)

    with pytest.raises(ValidationError) as error:
        SuiteConfigSchema().load({'trials': 0, 'suites': ['nope']})
    assert set(error.value.messages) == {'trials', 'suites'}


def test_registry():
    suites = {s['name']: s for s in list_suites()}
    assert set(suites) == set(SUITES)
    modes = {v['name']: v['mode'] for v in suites['pos_multiplier']['variants']}
    assert modes == {'proof-minus': 'theorem', 'stated-plus': 'recording'}
    assert all(
        v['mode'] == 'recording' for v in suites['prop_rediff']['variants']
    )
    assert 'counterexample-1x1' in suites['pos_multiplier']['witnesses']


def test_single_instance_run():
    config = SuiteConfig(trials=1, dims=(1,), suites=('thm25',), seed=3)
    report = run_suite(config)
    assert {row.variant for row in report.rows} == {'plus', 'minus'}
    assert all(row.trials == 1 for row in report.rows)
    assert report.theorem_violations == 0
    assert all(w.report.holds for w in report.witnesses)


def test_all_suites_hold():
    report = run_suite(SuiteConfig(**SMALL))
    assert report.theorem_violations == 0
    bad = [
        (row.name, row.norm, row.min_slack)
        for row in report.rows
        if row.mode == 'theorem' and row.violations
    ]
    assert bad == []
    suites = {row.suite for row in report.rows}
    assert suites == set(SUITES)


def test_recording_suites_are_not_violations():
    report = run_suite(
        SuiteConfig(trials=1, dims=(2,), suites=('pos_multiplier',))
    )
    stated = [
        w for w in report.witnesses if w.variant == 'stated-plus'
    ]
    assert stated and stated[0].mode == 'recording'
    assert stated[0].report.slack == pytest.approx(-2)
    assert report.theorem_violations == 0


def test_reports_are_deterministic():
    config = SuiteConfig(**SMALL, suites=('thm24', 'dadar', 'cor_ref'))
    first = render_report(run_suite(config), 'json')
    second = render_report(run_suite(config), 'json')
    assert first == second
    assert 'wall_time' not in json.loads(first)


def test_worker_pool_matches_sequential_run():
    config = SuiteConfig(**SMALL, suites=('prior', 'lem23_sv'))
    pooled = SuiteConfig(**SMALL, suites=('prior', 'lem23_sv'), workers=2)
    assert render_report(run_suite(config)) == render_report(run_suite(pooled))


def test_timing_is_opt_in():
    config = SuiteConfig(trials=1, dims=(2,), suites=('dadar',), timing=True)
    data = report_data(run_suite(config))
    assert data['wall_time'] >= 0
    assert 'timing' not in data['config']


def test_csv_report(tmp_path):
    config = SuiteConfig(**SMALL, suites=('thm21_first', 'cor22'))
    report = run_suite(config)
    path = tmp_path / 'report.csv'
    text = emit_report(report, 'csv', str(path))
    assert path.read_text() == text

    frame = pd.read_csv(path)
    assert list(frame.columns) == CSV_COLUMNS
    assert len(frame) == len(report.rows)
    assert set(frame['norm']) == {'hilbert-schmidt'}
    assert (frame['trials'] == 2).all()


def test_json_report_round_trip(tmp_path):
    config = SuiteConfig(**SMALL, suites=('remark_block',))
    report = run_suite(config)
    path = tmp_path / 'report.json'
    emit_report(report, 'json', str(path))

    data = json.loads(path.read_text())
    assert data['summary']['theorem_violations'] == 0
    assert data['config']['suites'] == ['remark_block']
    assert 'workers' not in data['config']
    assert len(data['rows']) == len(report.rows)
    assert data['witnesses'][0]['witness'] == 'zero-2x2'


def test_replay_reproduces_worst_instances():
    report = run_suite(SuiteConfig(**SMALL, suites=('thm25', 'lem23_norm')))
    records = json.loads(render_report(report))['rows']
    assert records
    for row in records:
        record = row['worst']
        replayed = replay(record)
        assert replayed.lhs == record['lhs']
        assert replayed.rhs == record['rhs']
        assert replayed.norm_label == record['norm_label']


def test_replay_with_another_seed_differs():
    report = run_suite(SuiteConfig(**SMALL, suites=('dadar',)))
    record = dict(report.worst_instances()[0])
    record['seed'] += 1
    assert replay(record).lhs != report.worst_instances()[0]['lhs']


def test_replay_of_witness():
    replayed = replay(
        {
            'suite': 'pos_multiplier',
            'witness': 'counterexample-1x1',
            'variant': 'stated-plus',
            'norm_label': 'operator',
        }
    )
    assert replayed.slack == pytest.approx(-2)
    assert not replayed.holds


@pytest.mark.parametrize(
    'record',
    [
        {},
        {'suite': 'nope'},
        {'suite': 'thm25', 'variant': 'plus'},
        {'suite': 'thm25', 'variant': 'sideways', 'trial': 0, 'dim': 2,
         'seed': 1, 'spectrum_radius': 0.9},
        {'suite': 'thm25', 'witness': 'missing'},
    ],
)
def test_malformed_replay_records(record):
    with pytest.raises(ConfigError):
        replay(record)


def test_summarize_report(tmp_path):
    config = SuiteConfig(**SMALL, suites=('dadar', 'pos_multiplier'))
    report = run_suite(config)
    for name, fmt in (('report.csv', 'csv'), ('report.json', 'json')):
        path = tmp_path / name
        emit_report(report, fmt, str(path))
        summary = summarize_report(str(path))
        assert list(summary.columns) == SUMMARY_COLUMNS
        assert list(summary['suite']) == ['dadar', 'pos_multiplier']
        dadar = summary.iloc[0]
        assert dadar['evaluations'] == sum(
            r.trials for r in report.rows if r.suite == 'dadar'
        )
        assert dadar['theorem_violations'] == 0


def test_summarize_empty_csv(tmp_path):
    path = tmp_path / 'empty.csv'
    path.write_text(','.join(CSV_COLUMNS) + '\n')
    summary = summarize_report(str(path))
    assert summary.empty
    assert list(summary.columns) == SUMMARY_COLUMNS


def test_proof_form_of_positive_multipliers_over_200_trials():
    report = run_suite(SuiteConfig(trials=200, suites=('pos_multiplier',)))
    rows = [row for row in report.rows if row.variant == 'proof-minus']
    assert rows and all(row.trials == 200 for row in rows)
    assert report.theorem_violations == 0


def test_prior_registers_numerical_range_variants():
    names = {v.name for v in SUITES['prior'].variants}
    assert names == {
        *ineq.PRIOR_FORMS,
        *(f'numrange.{which}' for which in ineq.PRIOR_FORMS),
    }
    report = run_suite(SuiteConfig(**SMALL, suites=('prior',)))
    checks = {row.name for row in report.rows}
    assert 'prior.numrange.1.3' in checks
    assert report.theorem_violations == 0


# Suites of the theorem clean pass, timed at a tenth of its trial count.
TIMED_SUITES = (
    'prior',
    'thm21_first',
    'thm21_second',
    'cor22',
    'lem23_sv',
    'lem23_norm',
    'thm24',
    'thm25',
    'remark_conj',
    'dadar',
    'cor_ref',
    'numrange',
)


def test_theorem_suites_run_within_budget():
    report = run_suite(SuiteConfig(trials=20, suites=TIMED_SUITES))
    assert report.theorem_violations == 0
    assert report.wall_time < 6.0
