"""
Landing Gear System Verification
Main Application - command line driver
"""

import argparse
import json
import logging
import os
import sys

import config
from checker import check, check_properties, explore, format_trace, read_schedule, simulate
from contracts import (CompositionConflict, Facet, compose, format_contract, layered_verify,
                       parse_contract)
from dashboard_generator import create_html_dashboard
from excel_report import ExcelReporter
from lgs_models import (FaultSpec, assemble_system, build_interface, milestone_timeline,
                        sequence_schedule, timeline_from_trace, tripped_monitors)
from pml_bridge import parse_pml, translate, weakly_bisimilar
from prop_lang import (compile_property, parse_property_file, parse_query, to_query_text,
                       weaken_property)
from report_templates import generate_status_report, generate_timeline_report, generate_verdict_table
from ta_core import LgsError, dump_automaton, dump_network, network_to_dot, parse_network
from utils import (print_header, read_text, strip_timings, to_json, use_color, write_json,
                   write_text)
from visualization import VerificationCharts

logger = logging.getLogger('lgs')


# ========== SHARED OPTIONS ==========

def _add_network_options(parser):
    parser.add_argument('--model', help="network in the text model format (default: assembled system)")
    parser.add_argument('--fault', action='append', default=[],
                        help="stall a phase, e.g. door:MovingHighDown@10 (repeatable)")
    parser.add_argument('--p28', choices=config.P28_SCOPES, default=config.DEFAULT_P28_SCOPE,
                        help="scope of the P28 door monitor")
    parser.add_argument('--no-environment', action='store_true',
                        help="freeze speed and height")


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def load_network(args):
    if args.model:
        name = os.path.splitext(os.path.basename(args.model))[0]
        return parse_network(read_text(args.model), name=name)
    faults = [FaultSpec.parse(text) for text in args.fault]
    return assemble_system(faults=faults, p28_scope=args.p28, environment=not args.no_environment)


# ========== SUBCOMMANDS ==========

def cmd_model(args):
    """Emit the assembled (or loaded) network in the text model format"""

    network = load_network(args)
    text = dump_network(network)
    if args.out:
        write_text(args.out, text)
        print(f"✓ Saved: {args.out}")
    else:
        sys.stdout.write(text)
    return config.EXIT_OK


def _selected_properties(args, network):
    if args.query:
        asts = [parse_query(text, name=f"Q{k}") for k, text in enumerate(args.query, 1)]
    else:
        asts = parse_property_file(read_text(args.props)).properties
    if args.weak:
        clocks = tuple(network.clocks)
        asts = asts + [weaken_property(ast, clocks) for ast in asts if ast.consequent is not None]
    if args.layer:
        facet = Facet.parse(args.layer).name
        asts = [ast for ast in asts if ast.facet == facet]
    return asts


def build_check_report(network, graph, verdicts, layers=None):
    """JSON-ready report of one check run"""

    report = {
        'network': network.name,
        'faults': [],
        'p28_scope': None,
        'states': len(graph.states),
        'transitions': graph.transitions,
        'truncated': graph.truncated,
        'verdicts': [v.to_dict(network) for v in verdicts],
        'tripped_monitors': tripped_monitors(network, graph) if 'door' in network.automaton_index else [],
    }
    if layers is not None:
        report['layers'] = layers.to_dict(network)
    return report


def failing_properties(verdicts, waivers):
    return [v.property for v in verdicts if not v.passed and v.property not in waivers]


def cmd_check(args):
    """Explore once, check every selected property, print the verdict table"""

    network = load_network(args)
    asts = _selected_properties(args, network)
    for ast in asts:
        compile_property(ast, network)

    graph = explore(network, state_bound=args.bound, workers=args.workers)
    verdicts = check_properties(asts, network, graph)

    layers = None
    waivers = {} if args.strict else config.KNOWN_DISCREPANCIES
    if args.contracts:
        contract = parse_contract(read_text(args.contracts))
        layers = layered_verify(network, contract, graph, waivers=waivers)

    report = build_check_report(network, graph, verdicts, layers)
    report['faults'] = list(args.fault) if not args.model else []
    report['p28_scope'] = None if args.model else args.p28

    if args.json:
        sys.stdout.write(to_json(report))
    else:
        print_header("PROPERTY VERIFICATION")
        print(f"Network: {network.name} | States: {len(graph.states):,} | "
              f"Transitions: {graph.transitions:,}{' | TRUNCATED' if graph.truncated else ''}\n")
        print(generate_verdict_table(report['verdicts'], color=use_color()))
        if args.queries:
            print()
            for ast in asts:
                print(f"  {ast.name:<8} {to_query_text(compile_property(ast, network))}")
        if layers is not None:
            print(f"\nLayers stopped at: {layers.stopped_at.name if layers.stopped_at else 'none'}")
    if args.out:
        write_json(args.out, report)

    failed = failing_properties(verdicts, waivers)
    if layers is not None and not layers.passed:
        failed.append(layers.stopped_at.name)
    return config.EXIT_PROPERTY_FAILURE if failed else config.EXIT_OK


def cmd_simulate(args):
    """Seeded random run, or a scheduled one from a file or a nominal sequence"""

    network = load_network(args)
    schedule = None
    if args.schedule:
        schedule = read_schedule(read_text(args.schedule))
    elif args.sequence:
        schedule = sequence_schedule(args.sequence)
        if args.sequence == 'retraction':
            # a retraction starts from the extended, locked state
            schedule = sequence_schedule('extension') + schedule

    trace = simulate(network, steps=args.steps, seed=args.seed, schedule=schedule)
    if args.json:
        sys.stdout.write(to_json(trace.to_dict(network)))
    else:
        print_header("SIMULATION")
        print(format_trace(trace, network))
        if args.sequence:
            expected = milestone_timeline(args.sequence)
            observed = timeline_from_trace(trace, network, args.sequence)[-len(expected):]
            print(generate_timeline_report(args.sequence, expected, observed))
    if args.out:
        write_json(args.out, trace.to_dict(network))
    return config.EXIT_OK


def cmd_compose(args):
    """Compose two contracts facet by facet after the shared-variable check"""

    first, second = (parse_contract(read_text(path)) for path in args.contracts)
    try:
        composed, reports = compose(first, second)
    except CompositionConflict as conflict:
        if args.report:
            write_json(args.report, [r.to_dict() for r in conflict.reports])
        print(f"✗ {conflict}", file=sys.stderr)
        return config.EXIT_PROPERTY_FAILURE

    print_header("CONTRACT COMPOSITION")
    for report in reports:
        findings = ', '.join(f"{v}: {f}" for v, f in report.findings.items()) or 'no shared variables'
        print(f"  {report.facet.name:<14} {findings}")
    text = format_contract(composed)
    if args.out:
        write_text(args.out, text)
        print(f"✓ Saved: {args.out}")
    else:
        print()
        sys.stdout.write(text)
    if args.report:
        write_json(args.report, [r.to_dict() for r in reports])
    return config.EXIT_OK


def cmd_translate(args):
    """ProMeLa proctype to an automaton in the text model format"""

    automaton = translate(parse_pml(read_text(args.promela)))
    text = "\n".join(dump_automaton(automaton)) + "\n"
    if args.out:
        write_text(args.out, text)
        print(f"✓ Saved: {args.out}")
    else:
        sys.stdout.write(text)
    if args.compare_interface:
        same = weakly_bisimilar(automaton, build_interface())
        print(f"{'✓' if same else '✗'} weakly bisimilar to the interface automaton: {same}")
        return config.EXIT_OK if same else config.EXIT_PROPERTY_FAILURE
    return config.EXIT_OK


def cmd_export(args):
    """DOT description of the automata (not of the state graph)"""

    network = load_network(args)
    text = ''.join(network_to_dot(network))
    if args.dot:
        write_text(args.dot, text)
        print(f"✓ Saved: {args.dot}")
    else:
        sys.stdout.write(text)
    return config.EXIT_OK


def _load_report(path):
    try:
        report = json.loads(read_text(path))
    except json.JSONDecodeError as error:
        raise ValueError(f"{path} is not a JSON report: {error}") from None
    if not isinstance(report, dict) or not isinstance(report.get('verdicts'), list):
        raise ValueError(f"{path} has no verdict list")
    return report


def cmd_report(args):
    """Status document from a prior `check --json` output"""

    report = _load_report(args.input)
    if args.json:
        sys.stdout.write(to_json(strip_timings(report)))
    else:
        print(generate_status_report(report, color=use_color()))
    if args.excel:
        ExcelReporter(output_dir=args.excel).create_verdict_report(report)
    if args.charts:
        charts = VerificationCharts(output_dir=args.charts)
        charts.plot_layers(report)
        for mode in ('extension', 'retraction'):
            charts.plot_milestones(milestone_timeline(mode), mode)
    if args.dashboard:
        create_html_dashboard(report, filename=args.dashboard)
    return config.EXIT_OK


# ========== PARSER ==========

def build_parser():
    parser = argparse.ArgumentParser(
        prog='lgs',
        description="Timed-automata verification of the landing gear system")
    parser.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    sub = parser.add_subparsers(dest='command', required=True)

    model = sub.add_parser('model', help="emit the network in the text model format")
    _add_network_options(model)
    model.add_argument('-o', '--out')
    model.set_defaults(handler=cmd_model)

    check_cmd = sub.add_parser(
        'check', help="explore and check properties",
        description="Explore the network and check properties. Exit 0 when every property "
                    "holds, is found or is vacuous (an EF p -> q whose p is unreachable), "
                    "or is a waived known discrepancy; exit 1 otherwise.")
    _add_network_options(check_cmd)
    check_cmd.add_argument('--props', default=config.DEFAULT_PROPERTIES_PATH)
    check_cmd.add_argument('--query', action='append', default=[],
                           help="model-checker query such as 'A[] p imply q' (repeatable)")
    check_cmd.add_argument('--layer', help="only properties annotated with this facet")
    check_cmd.add_argument('--contracts', help="contract file for layered verification")
    check_cmd.add_argument('--weak', action='store_true', help="also check the weak variants")
    check_cmd.add_argument('--bound', type=_positive, default=config.DEFAULT_STATE_BOUND)
    check_cmd.add_argument('--workers', type=_positive, default=config.DEFAULT_WORKERS)
    check_cmd.add_argument('--strict', action='store_true',
                           help="known discrepancies fail the run too")
    check_cmd.add_argument('--queries', action='store_true', help="print the translated queries")
    check_cmd.add_argument('--json', action='store_true')
    check_cmd.add_argument('-o', '--out', help="also write the JSON report here")
    check_cmd.set_defaults(handler=cmd_check)

    sim = sub.add_parser('simulate', help="seeded or scheduled run")
    _add_network_options(sim)
    sim.add_argument('--seed', type=int, default=config.DEFAULT_SEED)
    sim.add_argument('--steps', type=_positive, default=config.DEFAULT_SIMULATION_STEPS)
    sim.add_argument('--schedule', help="file with one delay(d) or edge label per line")
    sim.add_argument('--sequence', choices=('extension', 'retraction'),
                     help="drive a nominal sequence")
    sim.add_argument('--json', action='store_true')
    sim.add_argument('-o', '--out')
    sim.set_defaults(handler=cmd_simulate)

    comp = sub.add_parser('compose', help="compose two contracts")
    comp.add_argument('--contracts', nargs=2, required=True, metavar='GC')
    comp.add_argument('-o', '--out')
    comp.add_argument('--report', help="consistency report (JSON)")
    comp.set_defaults(handler=cmd_compose)

    trans = sub.add_parser('translate', help="ProMeLa proctype to an automaton")
    trans.add_argument('--promela', required=True)
    trans.add_argument('-o', '--out')
    trans.add_argument('--compare-interface', action='store_true',
                       help="check weak bisimilarity with the interface automaton")
    trans.set_defaults(handler=cmd_translate)

    export = sub.add_parser('export', help="DOT export of the automata")
    _add_network_options(export)
    export.add_argument('--dot')
    export.set_defaults(handler=cmd_export)

    rep = sub.add_parser('report', help="status report from a JSON check output")
    rep.add_argument('--input', default=config.DEFAULT_REPORT_FILE)
    rep.add_argument('--json', action='store_true')
    rep.add_argument('--excel', help="directory for the Excel workbook")
    rep.add_argument('--charts', help="directory for the charts")
    rep.add_argument('--dashboard', help="HTML dashboard file")
    rep.set_defaults(handler=cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    logger.debug("configuration: %s", config.get_config())
    try:
        return args.handler(args)
    except (LgsError, OSError, ValueError) as error:
        print(f"error: {error}", file=sys.stderr)
        return config.EXIT_INPUT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
