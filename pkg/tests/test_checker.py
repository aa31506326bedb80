import pytest

import config
import oracle
from checker import (SimulationError, Trace, all_passed, check, check_properties, explore,
                     format_trace, read_schedule, replay, simulate)
from network_generator import MAX_CEILING, MAX_LOCATIONS, generate_network, generate_properties
from prop_lang import BoundedWitness, compile_property, parse_property_file, parse_query, to_query_text
from ta_core import parse_network
from utils import read_text

EXPECTED_NOMINAL = {
    'holds': ['P4', 'P4.1', 'P4.2', 'P5', 'P6', 'P9', 'P10', 'P18', 'P19', 'P20', 'P21', 'P22',
              'P23', 'P24'],
    'violated': ['P25', 'P26', 'P28', 'P33', 'P35'],
    'witness-found': ['P3', 'P7', 'P8', 'P11', 'P12', 'P14', 'P17'],
    'witness-absent': ['P13', 'P15', 'P16'],
    'vacuous': ['P27', 'P29', 'P30', 'P31', 'P32', 'P34'],
}

LASSO_MODEL = """
var bool flag = false
automaton a
  loc L0
  loc L1
  init L0
  edge L0 -> L1
  edge L1 -> L0
"""


@pytest.fixture(scope='module')
def nominal_verdicts(nominal_network, nominal_graph):
    properties = parse_property_file(read_text(config.DEFAULT_PROPERTIES_PATH)).properties
    return {v.property: v for v in check_properties(properties, nominal_network, nominal_graph)}


def test_nominal_graph_is_complete(nominal_graph):
    assert not nominal_graph.truncated
    assert nominal_graph.transitions > len(nominal_graph.states)


@pytest.mark.parametrize('result', sorted(EXPECTED_NOMINAL))
def test_nominal_verdicts(nominal_verdicts, result):
    got = {name for name, v in nominal_verdicts.items() if v.result == result}
    assert got == set(EXPECTED_NOMINAL[result])


def test_every_failure_outside_p25_is_a_known_discrepancy(nominal_verdicts):
    failing = {name for name, v in nominal_verdicts.items() if not v.passed}
    assert failing - set(config.KNOWN_DISCREPANCIES) == {'P25'}
    assert not all_passed(nominal_verdicts.values())


def test_witness_needs_one_state_with_both_sides(nominal_network, nominal_graph):
    properties = parse_property_file(read_text(config.DEFAULT_PROPERTIES_PATH)).properties
    witnesses = [compile_property(ast, nominal_network) for ast in properties]
    witnesses = [w for w in witnesses if isinstance(w, BoundedWitness)]
    assert len(witnesses) == 10
    for query in witnesses:
        together = any(query.p(s) and query.q(s) for s in nominal_graph.states)
        verdict = check(query, nominal_graph)
        assert (verdict.result == 'witness-found') == together, query.name
        if together:
            assert query.p(verdict.trace.final) and query.q(verdict.trace.final)


def test_disjoint_witness_is_absent_with_a_note(nominal_network, nominal_graph):
    ast = next(p for p in parse_property_file(read_text(config.DEFAULT_PROPERTIES_PATH)).properties
               if p.name == 'P15')
    query = compile_property(ast, nominal_network)
    assert to_query_text(query).startswith('E<> ')
    assert 'door_closed==true and door_open==true' in to_query_text(query)
    verdict = check(query, nominal_graph)
    assert verdict.result == 'witness-absent'
    assert 'together' in verdict.note


@pytest.mark.parametrize('text', [
    'A[] gear.man_highdown imply !door_open==false',
    'A[] failure_door==true or failure_gear==true imply interface.red',
])
def test_sample_queries_hold_on_the_nominal_network(text, nominal_network, nominal_graph):
    verdict = check(compile_property(parse_query(text), nominal_network), nominal_graph)
    assert verdict.result == 'holds'


def test_verdicts_keep_facets(nominal_verdicts):
    assert nominal_verdicts['P4'].facet == 'SAFETY'
    assert nominal_verdicts['P7'].facet == 'LIVENESS'


def test_witness_trace_reaches_the_timed_target(nominal_verdicts, nominal_network):
    trace = nominal_verdicts['P7'].trace
    final = trace.final
    assert nominal_network.value(final, 'actuator_position')
    assert not nominal_network.value(final, 'door_closed')
    assert nominal_network.value(final, 'ck_door') == 4
    assert replay(nominal_network, trace)


def test_violation_trace_ends_in_a_bad_state(nominal_verdicts, nominal_network):
    trace = nominal_verdicts['P25'].trace
    final = trace.final
    assert nominal_network.value(final, 'gear_locked_down')
    assert nominal_network.location_of(final, 'interface') != 'green'
    assert replay(nominal_network, trace)


def test_tampered_trace_does_not_replay(nominal_verdicts, nominal_network):
    trace = nominal_verdicts['P7'].trace
    assert not replay(nominal_network, Trace(trace.initial, trace.steps[1:]))


def test_verdict_dict_carries_trace(nominal_verdicts, nominal_network):
    record = nominal_verdicts['P7'].to_dict(nominal_network)
    assert record['result'] == 'witness-found'
    assert record['trace']['steps']
    assert 'trace' not in nominal_verdicts['P7'].to_dict(nominal_network, include_trace=False)


def test_format_trace_has_one_line_per_step(nominal_verdicts, nominal_network):
    trace = nominal_verdicts['P8'].trace
    lines = format_trace(trace, nominal_network).splitlines()
    assert len(lines) == len(trace) + 2
    assert '(initial)' in lines[1]


def test_merged_delays_in_trace(tiny_model):
    network = parse_network(tiny_model)
    verdict = check(compile_property(parse_query('E<> a.L1'), network), explore(network))
    assert verdict.result == 'witness-found'
    assert verdict.trace.labels == ['delay(3)', 'a.L0->L1']


def test_leads_to_holds_under_invariant(tiny_model):
    network = parse_network(tiny_model)
    verdict = check(compile_property(parse_query('a.L0 --> a.L1'), network), explore(network))
    assert verdict.result == 'holds'


def test_leads_to_stuck_counterexample(tiny_model):
    network = parse_network(tiny_model.replace('loc L0 inv ck<=3', 'loc L0'))
    verdict = check(compile_property(parse_query('a.L0 --> a.L1'), network), explore(network))
    assert verdict.result == 'violated'
    assert verdict.note == 'stuck'
    assert network.location_of(verdict.trace.final, 'a') == 'L0'


def test_leads_to_lasso_counterexample():
    network = parse_network(LASSO_MODEL)
    verdict = check(compile_property(parse_query('a.L0 --> flag'), network), explore(network))
    assert verdict.result == 'violated'
    assert verdict.note == 'lasso'


def test_truncated_graph_is_inconclusive(nominal_network):
    graph = explore(nominal_network, state_bound=10)
    assert graph.truncated
    assert len(graph.states) == 10
    verdict = check(compile_property(parse_query('A[] not interface.red', 'q'), nominal_network), graph)
    assert verdict.result == 'inconclusive'
    assert not verdict.passed


def test_state_bound_must_be_positive(nominal_network):
    with pytest.raises(ValueError):
        explore(nominal_network, state_bound=0)


def test_parallel_exploration_matches_sequential(quiet_network, quiet_graph):
    graph = explore(quiet_network, workers=4)
    assert graph.states == quiet_graph.states
    assert graph.edges == quiet_graph.edges


def test_simulation_is_seeded(quiet_network):
    first = simulate(quiet_network, steps=60, seed=3)
    second = simulate(quiet_network, steps=60, seed=3)
    assert first.labels == second.labels
    assert replay(quiet_network, first)


def test_negative_seed_wraps_to_64_bits(quiet_network):
    trace = simulate(quiet_network, steps=20, seed=-1)
    assert trace.labels == simulate(quiet_network, steps=20, seed=2**64 - 1).labels
    assert replay(quiet_network, trace)


def test_schedule_step_not_enabled(nominal_network):
    with pytest.raises(SimulationError, match="step 1 'gear.extended->locked_down' is not enabled"):
        simulate(nominal_network, schedule=['gear.extended->locked_down'])


def test_schedule_delay_past_invariant(tiny_model):
    with pytest.raises(SimulationError, match='time cannot pass'):
        simulate(parse_network(tiny_model), schedule=['delay(4)'])


def test_read_schedule_skips_comments():
    text = "# extension\nactuator.up->down\n\ndelay(4)  # unlock\n"
    assert read_schedule(text) == ['actuator.up->down', 'delay(4)']


def test_schedule_files_run(nominal_network):
    for name in ('extension.txt', 'retraction.txt'):
        schedule = read_schedule(read_text(f"{config.SCHEDULES_DIR}/{name}"))
        trace = simulate(nominal_network, schedule=schedule)
        assert replay(nominal_network, trace)


@pytest.mark.parametrize('seed', range(50))
def test_checker_agrees_with_brute_force(seed):
    network = generate_network(seed)
    graph = explore(network)
    space = oracle.StateSpace(network)
    assert len(graph.states) == len(space.states)
    for ast in generate_properties(network, seed):
        query = compile_property(ast, network)
        assert check(query, graph).result == oracle.verdict(query, space), ast.name


def test_generated_networks_are_seeded_and_bounded():
    for seed in range(20):
        network = generate_network(seed)
        assert generate_network(seed).automata == network.automata
        assert network.ceiling <= MAX_CEILING
        assert sum(len(a.locations) for a in network.automata) <= MAX_LOCATIONS


def test_generated_witnesses_match_a_single_state_search():
    kinds = set()
    for seed in range(20):
        network = generate_network(seed)
        space = oracle.StateSpace(network)
        for ast in generate_properties(network, seed):
            query = compile_property(ast, network)
            kinds.add(query.kind)
            if isinstance(query, BoundedWitness):
                together = any(query.p(s) and query.q(s) for s in space.states)
                expected = 'witness-found' if together else 'witness-absent'
                assert oracle.verdict(query, space) == expected, ast.name
    assert kinds == {'invariant', 'reachable', 'leads-to', 'witness'}
