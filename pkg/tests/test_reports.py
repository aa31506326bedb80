import pytest
from openpyxl import load_workbook

import config
from dashboard_generator import create_html_dashboard
from excel_report import ExcelReporter
from lgs_models import milestone_timeline
from report_templates import generate_status_report, generate_timeline_report, generate_verdict_table
from utils import calculate_percentage, format_ds, result_summary, strip_timings, verdicts_dataframe
from visualization import VerificationCharts


def _verdict(name, facet, kind, result):
    return {'property': name, 'facet': facet, 'kind': kind, 'result': result,
            'states': 1200, 'transitions': 3400, 'time_ms': 1.5}


@pytest.fixture
def report():
    verdicts = [
        _verdict('P4', 'SAFETY', 'invariant', 'holds'),
        _verdict('P16', 'SAFETY', 'witness', 'witness-absent'),
        _verdict('P25', 'ATTAINABILITY', 'invariant', 'violated'),
        _verdict('P27', 'ATTAINABILITY', 'invariant', 'vacuous'),
    ]
    return {
        'network': 'lgs',
        'faults': [],
        'p28_scope': 'verbatim',
        'states': 1200,
        'transitions': 3400,
        'truncated': False,
        'verdicts': verdicts,
        'tripped_monitors': [{'monitor': 'P28', 'target': 'door', 'clock': 'ck_door',
                              'threshold': 44, 'reading': 45, 'discrepancy': True}],
        'layers': {
            'stopped_at': 'ATTAINABILITY',
            'layers': [
                {'facet': 'SAFETY', 'priority': 2, 'passed': True, 'waived': ['P16'],
                 'verdicts': verdicts[:2]},
                {'facet': 'ATTAINABILITY', 'priority': 4, 'passed': False, 'waived': [],
                 'verdicts': verdicts[2:]},
                {'facet': 'LIVENESS', 'priority': 5, 'passed': None, 'waived': [], 'verdicts': []},
            ],
        },
    }


def test_format_helpers():
    assert format_ds(55) == '5.5 s'
    assert format_ds(None) == '-'
    assert calculate_percentage(1, 4) == 25.0
    assert calculate_percentage(1, 0) == 0


def test_verdicts_dataframe_flags(report):
    df = verdicts_dataframe(report['verdicts'])
    assert list(df['passed']) == [True, False, False, True]
    assert list(df['discrepancy']) == [False, True, False, False]
    summary = result_summary(df)
    assert summary['count'].sum() == 4
    assert verdicts_dataframe([]).empty


def test_strip_timings(report):
    stripped = strip_timings(report)
    assert 'time_ms' not in stripped['verdicts'][0]
    assert 'time_ms' not in stripped['layers']['layers'][0]['verdicts'][0]
    assert 'time_ms' in report['verdicts'][0]


def test_verdict_table_marks_discrepancies(report):
    lines = generate_verdict_table(report['verdicts']).splitlines()
    assert lines[0].startswith('Property')
    assert len(lines) == 2 + len(report['verdicts'])
    p16 = next(line for line in lines if line.startswith('P16'))
    assert p16.endswith(' *')


def test_status_report_sections(report):
    text = generate_status_report(report)
    assert 'Passed:        2 of 4' in text
    assert 'Vacuous:       1 (antecedent unreachable, counted as passing)' in text
    assert 'QUERY MAPPING' in text
    assert 'Stopped at: ATTAINABILITY' in text
    assert '(waived: P16)' in text
    assert 'skipped' in text
    assert config.KNOWN_DISCREPANCIES['P16'] in text
    assert 'P28   door  ck_door=45 (threshold 44) discrepancy' in text


def test_timeline_report_flags_mismatches():
    expected = milestone_timeline('extension')
    observed = list(expected)
    observed[1] = ('open', 17, 0)
    text = generate_timeline_report('extension', expected, observed[:-1])
    assert 'EXTENSION TIMELINE' in text
    assert text.count('MISMATCH') == 1
    assert text.count('missing') == 1
    assert '5.5 s' in text


def test_excel_workbook(report, tmp_path):
    path = ExcelReporter(output_dir=str(tmp_path)).create_verdict_report(report)
    wb = load_workbook(path)
    assert wb.sheetnames == ['Verdicts', 'Summary', 'Layers', 'Monitors']
    verdicts = wb['Verdicts']
    assert verdicts['A1'].value == 'Property Verification Status - lgs'
    assert verdicts['A3'].value == 'property'
    assert verdicts['A4'].value == 'P4'
    assert verdicts['A3'].fill.start_color.rgb.endswith(config.EXCEL_HEADER_COLOR)
    layers = wb['Layers']
    assert [c.value for c in layers[4]][:3] == ['LIVENESS', 5, 'skipped']


def test_dashboard(report, tmp_path):
    path = tmp_path / 'dashboard.html'
    create_html_dashboard(report, filename=str(path))
    html = path.read_text(encoding='utf-8')
    assert html.strip().startswith('<!DOCTYPE html>')
    assert 'P16 *' in html
    assert 'FAILED' in html
    assert config.RESULT_COLORS['violated'] in html


def test_charts(report, tmp_path):
    charts = VerificationCharts(output_dir=str(tmp_path))
    assert charts.plot_layers(report).endswith('layer_results.png')
    assert (tmp_path / 'layer_results.png').exists()
    assert charts.plot_layers({'verdicts': []}) is None
    charts.plot_milestones(milestone_timeline('retraction'), 'retraction')
    assert (tmp_path / 'retraction_milestones.png').exists()
