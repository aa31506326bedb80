import json
import logging
import os

import pytest

import config
from checker import Verdict
from main import build_parser, failing_properties, main

TINY = """
clock ck
automaton a
  loc L0 inv ck<=3
  loc L1
  init L0
  edge L0 -> L1 guard ck==3 reset ck
"""

PROPERTIES = """
/*facet: SAFETY*/ P1 = AG a.L0 || a.L1;
/*facet: LIVENESS*/ P2 = EF a.L1;
/*facet: FUNCTIONALITY*/ P3 = EG a.L1 -> ck==3;
"""


@pytest.fixture
def tiny_path(tmp_path):
    path = tmp_path / 'tiny.ta'
    path.write_text(TINY)
    return str(path)


@pytest.fixture
def props_path(tmp_path):
    path = tmp_path / 'tiny.psl'
    path.write_text(PROPERTIES)
    return str(path)


def _contract_path(name):
    return os.path.join(config.PROJECT_DIR, config.CONTRACTS_DIR, name)


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_bound_must_be_positive(tiny_path):
    with pytest.raises(SystemExit):
        main(['check', '--model', tiny_path, '--bound', '0'])


def test_model_round_trip(tiny_path, capsys):
    assert main(['model', '--model', tiny_path]) == config.EXIT_OK
    out = capsys.readouterr().out
    assert 'automaton a' in out
    assert 'edge L0 -> L1 guard ck==3 reset ck' in out


def test_check_json_report(tiny_path, capsys):
    code = main(['check', '--model', tiny_path, '--query', 'E<> a.L1', '--json'])
    assert code == config.EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report['network'] == 'tiny'
    assert report['p28_scope'] is None
    assert report['tripped_monitors'] == []
    (verdict,) = report['verdicts']
    assert (verdict['property'], verdict['result']) == ('Q1', 'witness-found')
    assert verdict['trace']['steps'][-1]['step'] == 'a.L0->L1'


def test_check_violation_exits_one(tiny_path, capsys):
    assert main(['check', '--model', tiny_path, '--query', 'A[] a.L0']) == config.EXIT_PROPERTY_FAILURE
    out = capsys.readouterr().out
    assert 'PROPERTY VERIFICATION' in out
    assert 'violated' in out


def test_check_layer_and_weak_variants(tiny_path, props_path, capsys):
    code = main(['check', '--model', tiny_path, '--props', props_path, '--weak', '--json'])
    assert code == config.EXIT_OK
    names = [v['property'] for v in json.loads(capsys.readouterr().out)['verdicts']]
    assert names == ['P1', 'P2', 'P3', 'P3bis']

    main(['check', '--model', tiny_path, '--props', props_path, '--layer', 'safety', '--json'])
    names = [v['property'] for v in json.loads(capsys.readouterr().out)['verdicts']]
    assert names == ['P1']


def test_check_prints_translated_queries(tiny_path, props_path, capsys):
    main(['check', '--model', tiny_path, '--props', props_path, '--queries'])
    out = capsys.readouterr().out
    assert 'A[] a.L0 or a.L1' in out
    assert 'E<> a.L1' in out


@pytest.mark.parametrize('argv', [
    ['check', '--model', 'no/such/model.ta'],
    ['check', '--query', 'Z[] door_open'],
    ['check', '--query', 'A[] wing_folded'],
    ['check', '--fault', 'wing:MovingHighDown@10', '--query', 'A[] door_open'],
    ['compose', '--contracts', 'missing.gc', 'missing.gc'],
    ['report', '--input', 'no/such/report.json'],
])
def test_input_errors_exit_two(argv, capsys):
    assert main(argv) == config.EXIT_INPUT_ERROR
    assert 'error: ' in capsys.readouterr().err


def test_waivers_and_strict_mode():
    verdicts = [Verdict('P26', 'invariant', 'violated'), Verdict('P4', 'invariant', 'holds'),
                Verdict('Q1', 'witness', 'witness-absent')]
    assert failing_properties(verdicts, config.KNOWN_DISCREPANCIES) == ['Q1']
    assert failing_properties(verdicts, {}) == ['P26', 'Q1']


def test_report_outputs(tiny_path, props_path, tmp_path, capsys):
    out = str(tmp_path / 'check.json')
    assert main(['check', '--model', tiny_path, '--props', props_path, '-o', out]) == config.EXIT_OK
    capsys.readouterr()

    assert main(['report', '--input', out, '--json']) == config.EXIT_OK
    stripped = json.loads(capsys.readouterr().out)
    assert all('time_ms' not in v for v in stripped['verdicts'])

    excel_dir = tmp_path / 'excel'
    charts_dir = tmp_path / 'charts'
    dashboard = tmp_path / 'dashboard.html'
    code = main(['report', '--input', out, '--excel', str(excel_dir), '--charts', str(charts_dir),
                 '--dashboard', str(dashboard)])
    assert code == config.EXIT_OK
    assert 'PROPERTY VERIFICATION STATUS' in capsys.readouterr().out
    assert (excel_dir / 'verification_status.xlsx').exists()
    assert (charts_dir / 'layer_results.png').exists()
    assert (charts_dir / 'extension_milestones.png').exists()
    assert 'P3bis' not in dashboard.read_text()
    assert 'witness-found' in dashboard.read_text()


def test_report_rejects_non_reports(tmp_path, capsys):
    bad = tmp_path / 'bad.json'
    bad.write_text('{"verdicts": 3}')
    assert main(['report', '--input', str(bad)]) == config.EXIT_INPUT_ERROR
    assert 'no verdict list' in capsys.readouterr().err


def test_compose_contracts(tmp_path, capsys):
    report_path = tmp_path / 'consistency.json'
    code = main(['compose', '--contracts', _contract_path('interface.gc'), _contract_path('actuator.gc'),
                 '--report', str(report_path)])
    assert code == config.EXIT_OK
    out = capsys.readouterr().out
    assert 'contract GC_Int+GC_Act' in out
    assert 'ck_gear: compatible-implied' in out
    assert [r['facet'] for r in json.loads(report_path.read_text())] == [
        'SAFETY', 'FUNCTIONALITY', 'ATTAINABILITY']


def test_compose_conflict_exits_one(tmp_path, capsys):
    left = tmp_path / 'a.gc'
    right = tmp_path / 'b.gc'
    left.write_text("facet SAFETY { assert property q1 = AG landing==true -> door_open==true; }")
    right.write_text("facet SAFETY { assert property q2 = AG landing==false -> door_open==true; }")
    assert main(['compose', '--contracts', str(left), str(right)]) == config.EXIT_PROPERTY_FAILURE
    assert 'SAFETY:landing' in capsys.readouterr().err


def test_translate_interface(tmp_path, capsys):
    pml = os.path.join(config.PROJECT_DIR, config.MODELS_DIR, 'interface.pml')
    out = tmp_path / 'interface.ta'
    assert main(['translate', '--promela', pml, '-o', str(out), '--compare-interface']) == config.EXIT_OK
    assert 'weakly bisimilar to the interface automaton: True' in capsys.readouterr().out
    assert 'automaton interface' in out.read_text()


def test_export_dot(tiny_path, capsys):
    assert main(['export', '--model', tiny_path]) == config.EXIT_OK
    assert capsys.readouterr().out.startswith('digraph network {')


def test_simulate_json_is_seeded(tiny_path, capsys):
    main(['simulate', '--model', tiny_path, '--seed', '5', '--steps', '6', '--json'])
    first = json.loads(capsys.readouterr().out)
    main(['simulate', '--model', tiny_path, '--seed', '5', '--steps', '6', '--json'])
    assert json.loads(capsys.readouterr().out) == first


def test_simulate_accepts_negative_seeds(tiny_path, capsys):
    assert main(['simulate', '--model', tiny_path, '--seed', '-1', '--steps', '4', '--json']) == config.EXIT_OK
    assert json.loads(capsys.readouterr().out)['steps']


def test_check_help_explains_vacuous_results(capsys):
    with pytest.raises(SystemExit):
        main(['check', '--help'])
    assert 'vacuous' in capsys.readouterr().out


@pytest.mark.parametrize('sequence', ['extension', 'retraction'])
def test_simulate_nominal_sequences(sequence, capsys):
    code = main(['simulate', '--no-environment', '--sequence', sequence])
    assert code == config.EXIT_OK
    out = capsys.readouterr().out
    assert f'{sequence.upper()} TIMELINE' in out
    assert 'MISMATCH' not in out
    assert 'missing' not in out


def test_verbose_logs_the_configuration(tiny_path, caplog):
    with caplog.at_level(logging.DEBUG, logger='lgs'):
        main(['-v', 'model', '--model', tiny_path])
    assert "'state_bound': 5000000" in caplog.text
    assert config.get_config()['timing']['door_unlock_high'] == config.DOOR_UNLOCK_HIGH
