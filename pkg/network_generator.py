"""
Random Network Generator
Small seeded timed-automata networks for cross-checking the checker
"""

import numpy as np

from prop_lang import PropertyAst, parse_expression
from ta_core import (Constraint, Edge, Guard, Location, Network, RECEIVE, SEND, Sync,
                     TimedAutomaton, VariableDecl)

MAX_LOCATIONS = 6
MAX_CEILING = 10


def _random_automaton(rng, name, clock, size, max_constant, role):
    locations = []
    for k in range(size):
        invariant = Guard()
        if k > 0 and rng.random() < 0.4:
            invariant = Guard((Constraint(clock, '<=', int(rng.integers(1, max_constant + 1))),))
        locations.append(Location(f"L{k}", invariant, urgent=bool(k > 0 and rng.random() < 0.1)))

    edges = []
    for _ in range(int(rng.integers(size, 2 * size + 2))):
        source, target = (f"L{int(i)}" for i in rng.integers(0, size, 2))
        conjuncts = []
        if rng.random() < 0.6:
            op = str(rng.choice(['>=', '==', '<', '>']))
            conjuncts.append(Constraint(clock, op, int(rng.integers(0, max_constant + 1))))
        if rng.random() < 0.3:
            conjuncts.append(Constraint('flag', '==', bool(rng.random() < 0.5)))
        sync = Sync()
        if role is not None and rng.random() < 0.25:
            sync = Sync(role, 'go')
        resets = (clock,) if rng.random() < 0.5 else ()
        updates = (('flag', bool(rng.random() < 0.5)),) if rng.random() < 0.3 else ()
        edges.append(Edge(source, target, Guard(tuple(conjuncts)), sync, resets, updates))

    return TimedAutomaton(name=name, locations=tuple(locations), initial='L0', edges=tuple(edges),
                          clocks=(clock,), channels=('go',) if role is not None else ())


def generate_network(seed, max_locations=MAX_LOCATIONS, max_ceiling=MAX_CEILING):
    """
    One or two automata with at most max_locations locations in total and
    every clock constant below max_ceiling, so the ceiling stays within bound
    """

    rng = np.random.default_rng(seed)
    max_constant = max_ceiling - 1
    if max_locations >= 4 and rng.random() < 0.5:
        left = int(rng.integers(2, max_locations - 1))
        right = int(rng.integers(2, max_locations - left + 1))
        automata = [_random_automaton(rng, 'a', 'x', left, max_constant, SEND),
                    _random_automaton(rng, 'b', 'y', right, max_constant, RECEIVE)]
    else:
        size = int(rng.integers(2, max_locations + 1))
        automata = [_random_automaton(rng, 'a', 'x', size, max_constant, None)]

    return Network(automata, variables=(VariableDecl('flag', 'bool', False),), name=f"random{seed}")


def random_atoms(network):
    """Candidate atomic predicates over a generated network"""

    atoms = ['flag==true', 'flag==false']
    for automaton in network.automata:
        atoms.extend(f"{automaton.name}.{loc}" for loc in automaton.location_ids())
    for clock in network.clocks:
        atoms.extend(f"{clock}>={k}" for k in (1, network.max_constant))
    return atoms


def generate_properties(network, seed, count=3):
    """Random AG, EF, AF and EG (witness) properties over a generated network"""

    rng = np.random.default_rng(seed)
    atoms = random_atoms(network)

    def formula():
        picked = [str(a) for a in rng.choice(atoms, size=int(rng.integers(1, 3)), replace=False)]
        joiner = ' && ' if rng.random() < 0.5 else ' || '
        return parse_expression(joiner.join(picked))

    properties = []
    for k in range(count):
        for quantifier in ('AG', 'EF', 'AF', 'EG'):
            if quantifier == 'EG':
                consequent = formula()
            else:
                consequent = formula() if quantifier == 'AF' and rng.random() < 0.5 else None
            properties.append(PropertyAst(f"R{k}{quantifier}", quantifier, formula(), consequent))
    return properties
