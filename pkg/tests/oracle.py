"""
Brute-force verdicts over an adjacency matrix, independent of the
checker's graph search
"""

import numpy as np

from prop_lang import BoundedWitness, Invariant, LeadsTo, Reachable


class StateSpace:
    """Every reachable state, found by a naive fixpoint, with a boolean adjacency matrix"""

    def __init__(self, network):
        self.network = network
        states = {network.initial_state()}
        edges = set()
        changed = True
        while changed:
            changed = False
            for state in list(states):
                for transition in network.successors(state):
                    edges.add((state, transition.state))
                    if transition.state not in states:
                        states.add(transition.state)
                        changed = True
        self.states = sorted(states, key=repr)
        index = {s: i for i, s in enumerate(self.states)}
        self.initial = index[network.initial_state()]
        count = len(self.states)
        self.adjacency = np.zeros((count, count), dtype=bool)
        for source, target in edges:
            self.adjacency[index[source], index[target]] = True

    def closure(self):
        """Reflexive-transitive closure by repeated squaring"""
        reach = self.adjacency | np.eye(len(self.states), dtype=bool)
        while True:
            wider = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
            if (wider == reach).all():
                return reach
            reach = wider

    def mask(self, predicate):
        return np.array([bool(predicate(s)) for s in self.states], dtype=bool)

    def avoiding(self, q):
        """Greatest fixpoint: not q, and stuck or with a progressing successor inside"""
        progress = self.adjacency & ~np.eye(len(self.states), dtype=bool)
        stuck = ~progress.any(axis=1)
        inside = ~self.mask(q)
        while True:
            narrower = inside & (stuck | (progress & inside[np.newaxis, :]).any(axis=1))
            if (narrower == inside).all():
                return inside
            inside = narrower


def verdict(query, space):
    reach = space.closure()
    reachable = reach[space.initial]
    if isinstance(query, Invariant):
        bad = reachable & ~space.mask(query.phi)
        if bad.any():
            return 'violated'
        if query.vacuity is not None and not (reachable & space.mask(query.vacuity)).any():
            return 'vacuous'
        return 'holds'
    if isinstance(query, Reachable):
        return 'witness-found' if (reachable & space.mask(query.phi)).any() else 'witness-absent'
    if isinstance(query, BoundedWitness):
        found = (reachable & space.mask(query.p) & space.mask(query.q)).any()
        return 'witness-found' if found else 'witness-absent'
    if isinstance(query, LeadsTo):
        bad = reachable & space.mask(query.p) & space.avoiding(query.q)
        return 'violated' if bad.any() else 'holds'
    raise TypeError(f"not a query: {query!r}")
