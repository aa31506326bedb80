"""
Report Templates Module
Generate formatted text status reports
"""

from datetime import datetime

import config
from utils import colorize, format_ds

QUERY_MAPPING = [
    ('AG p', 'A[] p', 'invariant'),
    ('AG p -> q', 'A[] p imply q', 'invariant'),
    ('EF p -> q', 'A[] p imply q, plus E<> p', 'invariant with vacuity check'),
    ('EG p -> q', 'E<> p and q', 'witness'),
    ('any p -> q with clock==k in q', 'E<> p and q', 'witness'),
    ('EF p, EG p', 'E<> p', 'reachability'),
    ('AF p', 'true --> p', 'leads-to'),
]


def _banner(title, width=config.REPORT_WIDTH):
    return f"{'='*width}\n{title}\n{'='*width}\n"


def generate_verdict_table(verdicts, color=False):
    """One line per property: name, facet, result, states, time"""

    lines = [f"{'Property':<10} {'Facet':<14} {'Kind':<12} {'Result':<15} {'States':>9} {'ms':>9}",
             '-' * config.REPORT_WIDTH]
    for v in verdicts:
        result = v['result']
        shown = f"{result:<15}"
        if color:
            shown = colorize(result, shown)
        flag = ' *' if v['property'] in config.KNOWN_DISCREPANCIES else ''
        lines.append(f"{v['property']:<10} {(v.get('facet') or '-'):<14} {v['kind']:<12} "
                     f"{shown} {v['states']:>9,} {v.get('time_ms', 0):>9.1f}{flag}")
    return '\n'.join(lines)


def generate_status_report(report, color=False):
    """
    Status document of a check run: query mapping, verdicts, layers,
    discrepancies and tripped monitors
    """

    verdicts = report.get('verdicts', [])
    passed = sum(1 for v in verdicts if v['result'] in config.PASSING_RESULTS)
    vacuous = sum(1 for v in verdicts if v['result'] == 'vacuous')

    text = f"""
{_banner('LANDING GEAR SYSTEM - PROPERTY VERIFICATION STATUS')}
Report Date:   {datetime.now().strftime('%B %d, %Y')}
Network:       {report.get('network', '-')}
Faults:        {', '.join(report.get('faults', [])) or 'none'}
P28 scope:     {report.get('p28_scope', config.DEFAULT_P28_SCOPE)}
States:        {report.get('states', 0):,}
Truncated:     {'yes' if report.get('truncated') else 'no'}
Passed:        {passed} of {len(verdicts)}
Vacuous:       {vacuous} (antecedent unreachable, counted as passing)

{_banner('QUERY MAPPING')}
"""
    for source, query, kind in QUERY_MAPPING:
        text += f"  {source:<32} {query:<32} {kind}\n"

    text += f"\n{_banner('VERDICTS')}\n{generate_verdict_table(verdicts, color)}\n"
    text += "  * known discrepancy: the property fails as written on the nominal model\n"

    layers = report.get('layers')
    if layers:
        text += f"\n{_banner('LAYERS')}\n"
        for layer in layers['layers']:
            if layer['passed'] is None:
                status = 'skipped'
            else:
                status = 'passed' if layer['passed'] else 'FAILED'
            waived = f" (waived: {', '.join(layer['waived'])})" if layer['waived'] else ''
            text += (f"  [{layer['priority']}] {layer['facet']:<14} {status:<8} "
                     f"{len(layer['verdicts'])} properties{waived}\n")
        text += f"\n  Stopped at: {layers['stopped_at'] or 'none'}\n"

    flagged = [v for v in verdicts if v['property'] in config.KNOWN_DISCREPANCIES]
    if flagged:
        text += f"\n{_banner('DISCREPANCIES')}\n"
        for v in flagged:
            text += f"  {v['property']}: {v['result']}\n    {config.KNOWN_DISCREPANCIES[v['property']]}\n"

    tripped = report.get('tripped_monitors', [])
    if tripped:
        text += f"\n{_banner('TRIPPED MONITORS')}\n"
        for m in tripped:
            text += (f"  {m['monitor']:<5} {m['target']:<5} {m['clock']}={m['reading']} "
                     f"(threshold {m['threshold']}){' discrepancy' if m['discrepancy'] else ''}\n")

    text += '\n' + '=' * config.REPORT_WIDTH + '\n'
    return text


def generate_timeline_report(mode, expected, observed=None):
    """Milestone table: expected clock readings against an observed run"""

    text = f"\n{_banner(f'{mode.upper()} TIMELINE')}\n"
    text += f"{'Event':<15} {'ck_door':>8} {'ck_gear':>8} {'time':>8}"
    if observed is not None:
        text += f" {'observed':>18}"
    text += '\n' + '-' * config.REPORT_WIDTH + '\n'
    for i, (event, ck_door, ck_gear) in enumerate(expected):
        gear = '-' if ck_gear is None else ck_gear
        text += f"{event:<15} {ck_door:>8} {gear:>8} {format_ds(ck_door):>8}"
        if observed is not None:
            seen = observed[i] if i < len(observed) else None
            if seen is None:
                text += f" {'missing':>18}"
            else:
                mark = 'ok' if tuple(seen) == (event, ck_door, ck_gear) else 'MISMATCH'
                text += f" {str(seen[1]) + '/' + str(seen[2] if seen[2] is not None else '-'):>10} {mark:>7}"
        text += '\n'
    return text
