"""
Checker Module
Explicit-state exploration, verdicts with traces, and the seeded simulator
"""

import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

import config
from prop_lang import BoundedWitness, Invariant, LeadsTo, Reachable, compile_property
from ta_core import LgsError, NetworkState

logger = logging.getLogger(__name__)

_DELAY = re.compile(r'^delay\((\d+)\)$')
SEED_MASK = (1 << 64) - 1


class SimulationError(LgsError):
    """Scheduled step cannot be taken"""


# ========== TRACES ==========

@dataclass
class TraceStep:
    label: str
    state: NetworkState

    @property
    def delay(self):
        match = _DELAY.match(self.label)
        return int(match.group(1)) if match else 0


@dataclass
class Trace:
    """Initial snapshot followed by delay(d) and discrete steps; adjacent delays are merged"""
    initial: NetworkState
    steps: list = field(default_factory=list)

    def append(self, label, state):
        if self.steps and _DELAY.match(label) and self.steps[-1].delay:
            total = self.steps[-1].delay + int(_DELAY.match(label).group(1))
            self.steps[-1] = TraceStep(f"delay({total})", state)
        else:
            self.steps.append(TraceStep(label, state))

    @property
    def states(self):
        return [self.initial] + [step.state for step in self.steps]

    @property
    def final(self):
        return self.steps[-1].state if self.steps else self.initial

    @property
    def labels(self):
        return [step.label for step in self.steps]

    def __len__(self):
        return len(self.steps)

    def to_dict(self, network):
        return {
            'initial': network.describe(self.initial),
            'steps': [{'step': step.label, 'state': network.describe(step.state)}
                      for step in self.steps],
        }


def replay(network, trace):
    """True iff every step of the trace reproduces its recorded snapshot"""

    state = trace.initial
    if state != network.initial_state():
        return False
    for step in trace.steps:
        if step.delay:
            following = network.delay_successor(state, step.delay)
        else:
            following = next((t.state for t in network.discrete_successors(state)
                              if t.label == step.label and t.state == step.state), None)
        if following != step.state:
            return False
        state = following
    return True


def format_trace(trace, network, clocks=None):
    """Readable timeline: elapsed time, step and clock readings per line"""

    clocks = clocks or list(network.clocks)
    elapsed = 0
    lines = [f"{'t':>5}  {'step':<60} " + ' '.join(f"{c:>8}" for c in clocks)]
    lines.append(f"{elapsed:>5}  {'(initial)':<60} "
                 + ' '.join(f"{network.value(trace.initial, c):>8}" for c in clocks))
    for step in trace.steps:
        elapsed += step.delay
        lines.append(f"{elapsed:>5}  {step.label:<60} "
                     + ' '.join(f"{network.value(step.state, c):>8}" for c in clocks))
    return '\n'.join(lines)


# ========== EXPLORATION ==========

class StateGraph:
    """Reached states in BFS order with labelled edges and a BFS parent tree"""

    def __init__(self, network):
        self.network = network
        self.states = []
        self.index = {}
        self.edges = []
        self.out = []
        self.parent = []
        self.truncated = False
        self.initial = 0

    def add_state(self, state, parent):
        node = len(self.states)
        self.states.append(state)
        self.index[state] = node
        self.out.append([])
        self.parent.append(parent)
        return node

    def add_edge(self, source, target, label):
        self.out[source].append(len(self.edges))
        self.edges.append((source, target, label))

    @property
    def transitions(self):
        return len(self.edges)

    def successors(self, node, progressing=False):
        targets = [self.edges[e][1] for e in self.out[node]]
        if progressing:
            targets = [t for t in targets if t != node]
        return targets

    def path_edges(self, node):
        """Edge ids of the BFS tree path from the initial state to node"""
        path = []
        while self.parent[node] is not None:
            edge = self.parent[node]
            path.append(edge)
            node = self.edges[edge][0]
        return path[::-1]

    def trace(self, edge_ids):
        start = self.edges[edge_ids[0]][0] if edge_ids else self.initial
        trace = Trace(self.states[start])
        for edge in edge_ids:
            _, target, label = self.edges[edge]
            trace.append(label, self.states[target])
        return trace

    def trace_to(self, node):
        trace = Trace(self.states[self.initial])
        for edge in self.path_edges(node):
            _, target, label = self.edges[edge]
            trace.append(label, self.states[target])
        return trace


def explore(network, state_bound=config.DEFAULT_STATE_BOUND, workers=config.DEFAULT_WORKERS):
    """
    Breadth-first reachable graph; stops adding states at state_bound and
    flags the graph as truncated
    """

    if state_bound <= 0:
        raise ValueError("state_bound must be positive")

    graph = StateGraph(network)
    graph.add_state(network.initial_state(), None)
    frontier = [0]
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frontier:
            states = [graph.states[node] for node in frontier]
            # successor lists come back in frontier order; merging stays sequential
            results = pool.map(network.successors, states) if pool else map(network.successors, states)
            next_frontier = []
            for node, transitions in zip(frontier, results):
                for transition in transitions:
                    target = graph.index.get(transition.state)
                    if target is None:
                        if len(graph.states) >= state_bound:
                            graph.truncated = True
                            continue
                        target = graph.add_state(transition.state, len(graph.edges))
                        next_frontier.append(target)
                    graph.add_edge(node, target, transition.label)
            frontier = next_frontier
    finally:
        if pool:
            pool.shutdown()

    if graph.truncated:
        logger.warning("exploration of %s truncated at %d states", network.name, state_bound)
    logger.debug("explored %s: %d states, %d transitions",
                 network.name, len(graph.states), graph.transitions)
    return graph


# ========== VERDICTS ==========

@dataclass
class Verdict:
    property: str
    kind: str
    result: str
    trace: Trace = None
    states: int = 0
    transitions: int = 0
    time_ms: float = 0.0
    note: str = ''
    facet: str = None

    @property
    def passed(self):
        return self.result in config.PASSING_RESULTS

    def to_dict(self, network=None, include_trace=True):
        record = {
            'property': self.property,
            'kind': self.kind,
            'facet': self.facet,
            'result': self.result,
            'states': self.states,
            'transitions': self.transitions,
            'time_ms': round(self.time_ms, 3),
        }
        if self.note:
            record['note'] = self.note
        if include_trace and self.trace is not None and network is not None:
            record['trace'] = self.trace.to_dict(network)
        return record


def _first(graph, predicate, nodes=None):
    for node in (range(len(graph.states)) if nodes is None else nodes):
        if predicate(graph.states[node]):
            return node
    return None


def _check_invariant(query, graph):
    bad = _first(graph, lambda s: not query.phi(s))
    if bad is not None:
        return 'violated', graph.trace_to(bad), ''
    if graph.truncated:
        return 'inconclusive', None, 'graph truncated'
    if query.vacuity is not None and _first(graph, query.vacuity) is None:
        return 'vacuous', None, f"antecedent {query.vacuity} is unreachable"
    return 'holds', None, ''


def _check_reachable(query, graph):
    node = _first(graph, query.phi)
    if node is not None:
        return 'witness-found', graph.trace_to(node), ''
    if graph.truncated:
        return 'inconclusive', None, 'graph truncated'
    return 'witness-absent', None, ''


def _check_witness(query, graph):
    """First state (in BFS order) where p and q hold together"""

    node = _first(graph, lambda s: query.p(s) and query.q(s))
    if node is not None:
        return 'witness-found', graph.trace_to(node), ''
    if graph.truncated:
        return 'inconclusive', None, 'graph truncated'
    if _first(graph, query.p) is None:
        return 'witness-absent', None, f"antecedent {query.p} is unreachable"
    return 'witness-absent', None, f"no state satisfies {query.p} and {query.q} together"


def avoiding_set(graph, q):
    """
    Greatest fixpoint of states that can avoid q forever: not q, and either
    stuck (no progressing successor) or with a successor in the set
    """

    count = len(graph.states)
    inside = np.array([not q(s) for s in graph.states], dtype=bool)
    progress = [graph.successors(n, progressing=True) for n in range(count)]
    remaining = np.array([sum(1 for t in succ if inside[t]) for succ in progress], dtype=np.int64)
    predecessors = [[] for _ in range(count)]
    for node, succ in enumerate(progress):
        for target in succ:
            predecessors[target].append(node)

    worklist = [n for n in range(count) if inside[n] and progress[n] and remaining[n] == 0]
    while worklist:
        node = worklist.pop()
        if not inside[node]:
            continue
        inside[node] = False
        for pred in predecessors[node]:
            if inside[pred]:
                remaining[pred] -= 1
                if remaining[pred] == 0:
                    worklist.append(pred)
    return inside


def _check_leads_to(query, graph):
    if graph.truncated:
        return 'inconclusive', None, 'graph truncated'
    avoid = avoiding_set(graph, query.q)
    start = next((n for n in range(len(graph.states))
                  if avoid[n] and query.p(graph.states[n])), None)
    if start is None:
        return 'holds', None, ''

    # extend inside the avoiding set until a state repeats or nothing progresses
    edges = graph.path_edges(start)
    seen = {start}
    node = start
    note = 'stuck'
    while True:
        step = next((e for e in graph.out[node]
                     if graph.edges[e][1] != node and avoid[graph.edges[e][1]]), None)
        if step is None:
            break
        edges.append(step)
        node = graph.edges[step][1]
        if node in seen:
            note = 'lasso'
            break
        seen.add(node)
    return 'violated', graph.trace(edges), note


_CHECKS = {
    Invariant: _check_invariant,
    Reachable: _check_reachable,
    BoundedWitness: _check_witness,
    LeadsTo: _check_leads_to,
}


def check(query, graph):
    """Evaluate a compiled query over an explored graph"""

    started = time.perf_counter()
    result, trace, note = _CHECKS[type(query)](query, graph)
    elapsed = (time.perf_counter() - started) * 1000
    logger.debug("%s: %s", query.name, result)
    return Verdict(query.name, query.kind, result, trace, len(graph.states),
                   graph.transitions, elapsed, note)


def check_properties(properties, network, graph):
    """Compile and check each parsed property, keeping its facet"""

    verdicts = []
    for ast in properties:
        verdict = check(compile_property(ast, network), graph)
        verdict.facet = ast.facet
        verdicts.append(verdict)
    return verdicts


def all_passed(verdicts):
    return all(v.passed for v in verdicts)


# ========== SIMULATION ==========

def _scheduled_step(network, state, choice, position):
    match = _DELAY.match(choice)
    if match:
        following = network.delay_successor(state, int(match.group(1)))
        if following is None:
            raise SimulationError(f"step {position} '{choice}': time cannot pass here")
        return choice, following
    for transition in network.discrete_successors(state):
        if choice == transition.label or choice in transition.edge_labels:
            return transition.label, transition.state
    raise SimulationError(f"step {position} '{choice}' is not enabled")


def simulate(network, steps=config.DEFAULT_SIMULATION_STEPS, seed=config.DEFAULT_SEED, schedule=None):
    """
    Run from the initial state, either following schedule (delay(d) or an
    edge/sync label per entry) or choosing uniformly with a seeded generator
    """

    state = network.initial_state()
    trace = Trace(state)
    if schedule is not None:
        for position, choice in enumerate(schedule, start=1):
            label, state = _scheduled_step(network, state, choice.strip(), position)
            trace.append(label, state)
        return trace

    # any 64-bit seed, negative ones by their two's-complement value
    rng = np.random.default_rng(seed & SEED_MASK)
    for _ in range(steps):
        transitions = network.successors(state)
        if not transitions:
            logger.info("simulation deadlocked after %d steps", len(trace))
            break
        transition = transitions[int(rng.integers(len(transitions)))]
        state = transition.state
        trace.append(transition.label, state)
    return trace


def read_schedule(text):
    """One choice per line; blank lines and # comments are skipped"""
    choices = []
    for raw in text.splitlines():
        line = raw.split('#', 1)[0].strip()
        if line:
            choices.append(line)
    return choices
