import os

import pytest

import config
from lgs_models import build_interface
from pml_bridge import (PmlSyntaxError, UnsupportedConstructError, bisimulation_pairs, parse_pml,
                        translate, weakly_bisimilar)
from ta_core import Constraint, Guard, RECEIVE, Sync
from utils import read_text

WORKER = """
bool busy;
chan go = [0] of { bit };

active proctype worker() {
idle:
    do
    :: busy == false -> go?_; busy = true
    :: busy == true -> busy = false
    od
}
"""


@pytest.fixture(scope='module')
def interface_text():
    return read_text(os.path.join(config.PROJECT_DIR, config.MODELS_DIR, 'interface.pml'))


def test_parse_interface_process(interface_text):
    process = parse_pml(interface_text)
    assert process.name == 'interface'
    assert process.active
    assert process.channels == ('light_none', 'light_green', 'light_orange', 'failure')
    assert process.labels() == ['none', 'green', 'orange', 'red']
    assert len(process.branchings('if')) == 3
    assert len(process.branchings('do')) == 1


def test_translated_interface_matches_the_model(interface_text):
    translated = translate(parse_pml(interface_text))
    assert translated.location_ids() == ['none', 'green', 'orange', 'red']
    assert translated.initial == 'none'
    assert len(translated.edges) == 16
    assert {e.target for e in translated.edges if e.source == 'red'} == {'red'}
    assert all(e.sync.kind == RECEIVE for e in translated.edges)
    assert weakly_bisimilar(translated, build_interface())
    assert ('red', 'red') in bisimulation_pairs(translated, build_interface())


def test_missing_receive_breaks_bisimilarity(interface_text):
    head, _ = interface_text.split('red:')
    broken = translate(parse_pml(head + 'red:\n    do\n    :: failure?_\n    od\n}\n'))
    assert not weakly_bisimilar(broken, build_interface())
    assert ('red', 'red') not in bisimulation_pairs(broken, build_interface())


def test_translation_merges_guards_into_edges():
    automaton = translate(parse_pml(WORKER))
    assert automaton.initial == 'idle'
    assert len(automaton.locations) == 2
    assert automaton.clocks == ()
    receive = next(e for e in automaton.edges if e.sync == Sync(RECEIVE, 'go'))
    assert receive.source == 'idle'
    assert receive.guard == Guard((Constraint('busy', '==', False),))
    assert any(e.source == 'idle' and e.target == 'idle' and e.updates == (('busy', False),)
               for e in automaton.edges)
    assert any(e.updates == (('busy', True),) and e.target == 'idle' for e in automaton.edges)


def test_silent_reset_is_invisible():
    eager = translate(parse_pml(WORKER))
    reset_first = translate(parse_pml(WORKER.replace("bool busy;", "bool busy = true;")))
    assert weakly_bisimilar(eager, reset_first)


def test_local_guards_matter_for_bisimilarity():
    eager = translate(parse_pml(WORKER))
    blocked = translate(parse_pml(WORKER.replace("bool busy;", "bool busy = true;")
                                  .replace("    :: busy == true -> busy = false\n", "")))
    assert not weakly_bisimilar(eager, blocked)


@pytest.mark.parametrize('text,error,message', [
    ('active proctype p() { atomic { skip } }', UnsupportedConstructError, "unsupported construct 'atomic'"),
    ('proctype p(byte n) { skip }', UnsupportedConstructError, 'parameters'),
    ('proctype p() { skip } proctype q() { skip }', UnsupportedConstructError, 'only one proctype'),
    ('active proctype p() { goto nowhere }', PmlSyntaxError, "goto target 'nowhere' does not exist"),
    ('active proctype p() { x > 1 }', PmlSyntaxError, "undeclared variable 'x'"),
    ('active proctype p() { skip @ }', PmlSyntaxError, "unexpected character '@'"),
    ('bool x;', PmlSyntaxError, 'no proctype found'),
    ('active proctype p() { if fi }', PmlSyntaxError, "needs at least one '::' option"),
])
def test_rejected_programs(text, error, message):
    with pytest.raises(error, match=message):
        parse_pml(text)


def test_error_positions():
    with pytest.raises(PmlSyntaxError, match='line 3, column 5'):
        parse_pml("active proctype p() {\n    skip;\n    goto nowhere\n}\n")


@pytest.mark.parametrize('body', ['skip; break', 'if :: break fi'])
def test_break_outside_a_loop(body):
    process = parse_pml(f"active proctype p() {{ {body} }}")
    with pytest.raises(PmlSyntaxError, match='break outside a do-loop'):
        translate(process)
