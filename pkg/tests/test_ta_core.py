import pytest

from checker import explore
from ta_core import (Constraint, Edge, Guard, Location, ModelFormatError, Network,
                     NetworkValidationError, RECEIVE, SEND, Sync, TimedAutomaton, VariableDecl,
                     dump_network, network_to_dot, parse_network, validate_network)


def _automaton(name, locations, edges, clocks=(), variables=(), channels=(), initial='L0'):
    return TimedAutomaton(name, tuple(locations), initial, tuple(edges), tuple(clocks),
                          tuple(variables), tuple(channels))


def test_guard_parse_and_render():
    guard = Guard.parse('ck>=3 && flag==true')
    assert guard.conjuncts == (Constraint('ck', '>=', 3), Constraint('flag', '==', True))
    assert str(guard) == 'ck>=3 && flag==true'
    assert str(Guard.parse('true')) == 'true'


def test_bad_guard_is_rejected():
    with pytest.raises(ModelFormatError):
        Guard.parse('ck => 3')


def test_ceiling_is_max_constant_plus_one(tiny_model):
    network = parse_network(tiny_model)
    assert network.max_constant == 3
    assert network.ceiling == 4


def test_tiny_model_state_count(tiny_model):
    # L0 at ck 0..3, then L1 at ck 3 and at the ceiling
    graph = explore(parse_network(tiny_model))
    assert len(graph.states) == 6
    assert not graph.truncated


def test_time_locked_target_gives_five_states(tiny_model):
    model = tiny_model.replace('loc L1', 'loc L1 inv ck<=3')
    assert len(explore(parse_network(model)).states) == 5


def test_delay_respects_invariant(tiny_model):
    network = parse_network(tiny_model)
    start = network.initial_state()
    assert network.delay_successor(start, 3).clocks == (3,)
    assert network.delay_successor(start, 4) is None
    with pytest.raises(ValueError):
        network.delay_successor(start, 0)


def test_clock_saturates_at_ceiling(tiny_model):
    network = parse_network(tiny_model)
    at_three = network.delay_successor(network.initial_state(), 3)
    moved = network.discrete_successors(at_three)[0].state
    later = network.delay_successor(moved, 5)
    assert later.clocks == (network.ceiling,)
    assert network.delay_successor(later, 5) == later


def test_higher_ceiling_keeps_the_reachable_locations(tiny_model):
    network = parse_network(tiny_model)
    wider = network.with_ceiling(network.ceiling + 6)

    def discrete_part(graph):
        return {(s.locations, s.variables) for s in graph.states}

    assert discrete_part(explore(wider)) == discrete_part(explore(network))
    assert len(explore(wider).states) > len(explore(network).states)
    with pytest.raises(ValueError, match='must exceed'):
        network.with_ceiling(network.max_constant)


def test_urgent_location_blocks_delay():
    a = _automaton('a', [Location('L0', urgent=True), Location('L1')],
                   [Edge('L0', 'L1')], clocks=('x',))
    network = Network([a])
    assert network.delay_successor(network.initial_state(), 1) is None
    labels = [t.label for t in network.successors(network.initial_state())]
    assert labels == ['a.L0->L1']


def test_sender_updates_before_receiver_updates():
    flag = VariableDecl('v', 'int', 0)
    sender = _automaton('s', [Location('L0'), Location('L1')],
                        [Edge('L0', 'L1', sync=Sync(SEND, 'c'), updates=(('v', 1),))],
                        variables=(flag,), channels=('c',))
    receiver = _automaton('r', [Location('L0'), Location('L1')],
                          [Edge('L0', 'L1', sync=Sync(RECEIVE, 'c'), updates=(('v', 2),))],
                          channels=('c',))
    network = Network([sender, receiver])
    (transition,) = network.discrete_successors(network.initial_state())
    assert transition.label == 'c: s.L0->L1 | r.L0->L1'
    assert network.value(transition.state, 'v') == 2


def test_unmatched_send_is_not_enabled():
    sender = _automaton('s', [Location('L0'), Location('L1')],
                        [Edge('L0', 'L1', sync=Sync(SEND, 'c'))], channels=('c',))
    network = Network([sender])
    assert network.discrete_successors(network.initial_state()) == []


def test_validation_collects_every_error():
    a = _automaton('a', [Location('L0'), Location('L0')],
                   [Edge('L0', 'L9', Guard.parse('y>=1')),
                    Edge('L0', 'L0', sync=Sync(SEND, 'nochan'))],
                   initial='L5')
    report = validate_network([a])
    assert not report.ok
    text = str(report)
    assert "duplicate location 'L0'" in text
    assert "initial location 'L5'" in text
    assert "dangling edge" in text
    assert "undeclared clock or variable 'y'" in text
    assert "undeclared channel 'nochan'" in text


def test_channel_used_both_ways_is_an_error():
    a = _automaton('a', [Location('L0')],
                   [Edge('L0', 'L0', sync=Sync(SEND, 'c')), Edge('L0', 'L0', sync=Sync(RECEIVE, 'c'))],
                   channels=('c',))
    with pytest.raises(NetworkValidationError, match='duplicate channel direction'):
        Network([a])


def test_invariant_must_be_upper_bound():
    a = _automaton('a', [Location('L0', Guard.parse('x>=2'))], [], clocks=('x',))
    assert 'not an upper bound' in str(validate_network([a]))


def test_disconnected_location_is_a_warning():
    a = _automaton('a', [Location('L0'), Location('L1')], [])
    report = validate_network([a])
    assert report.ok
    assert report.warnings == ["a: location 'L1' not connected to initial location"]


def test_text_format_round_trip(tiny_model):
    network = parse_network(tiny_model, name='tiny')
    again = parse_network(dump_network(network), name='tiny')
    assert again.automata == network.automata
    assert again.clocks == network.clocks


def test_parse_error_reports_line():
    with pytest.raises(ModelFormatError, match='line 3'):
        parse_network("clock x\nautomaton a\n  loc L0 bogus\n  init L0\n")


def test_dump_keeps_edges_and_urgency(nominal_network):
    text = dump_network(nominal_network)
    assert 'loc unlocked urgent' in text
    assert 'sync extend_gear_now?' in text
    assert parse_network(text).automata == nominal_network.automata


def test_dot_export_has_one_cluster_per_automaton(nominal_network):
    dot = ''.join(network_to_dot(nominal_network))
    assert dot.startswith('digraph network {')
    for name in ('door', 'gear', 'actuator', 'interface'):
        assert f'"cluster_{name}"' in dot
    assert '"door.unlocking_high" -> "door.unlocked"' in dot
