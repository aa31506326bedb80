"""
Timed Automata Core
Discrete-time network kernel: data model, validation, successors, text format
"""

import logging
import operator
import re
from collections import deque
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)


class LgsError(Exception):
    """Base error for the verification toolkit"""


class ModelFormatError(LgsError):
    """Malformed text model"""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NetworkValidationError(LgsError):
    """Network failed validation"""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.errors))


OPERATORS = {
    '==': operator.eq,
    '!=': operator.ne,
    '<': operator.lt,
    '<=': operator.le,
    '>': operator.gt,
    '>=': operator.ge,
}

INTERNAL = 'internal'
SEND = 'send'
RECEIVE = 'receive'

_ATOM = re.compile(r'^\s*([A-Za-z_]\w*)\s*(==|!=|<=|>=|<|>)\s*(true|false|-?\d+)\s*$')
_IDENT = re.compile(r'^[A-Za-z_]\w*$')


def parse_literal(text):
    """Parse true/false or an integer literal"""
    text = text.strip()
    if text == 'true':
        return True
    if text == 'false':
        return False
    return int(text)


def format_literal(value):
    if value is True:
        return 'true'
    if value is False:
        return 'false'
    return str(value)


# ========== DATA MODEL ==========

@dataclass(frozen=True)
class Constraint:
    """Atomic constraint: name op value"""
    name: str
    op: str
    value: int

    def __str__(self):
        return f"{self.name}{self.op}{format_literal(self.value)}"


@dataclass(frozen=True)
class Guard:
    """Conjunction of atomic constraints (empty = true)"""
    conjuncts: tuple = ()

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if not text or text == 'true':
            return cls()
        conjuncts = []
        for part in text.split('&&'):
            match = _ATOM.match(part)
            if not match:
                raise ModelFormatError(f"bad constraint '{part.strip()}'")
            name, op, value = match.groups()
            conjuncts.append(Constraint(name, op, parse_literal(value)))
        return cls(tuple(conjuncts))

    def names(self):
        return {c.name for c in self.conjuncts}

    def __and__(self, other):
        return Guard(self.conjuncts + other.conjuncts)

    def __str__(self):
        if not self.conjuncts:
            return 'true'
        return ' && '.join(str(c) for c in self.conjuncts)


@dataclass(frozen=True)
class Location:
    id: str
    invariant: Guard = Guard()
    urgent: bool = False


@dataclass(frozen=True)
class Sync:
    kind: str = INTERNAL
    channel: str = None

    def __str__(self):
        if self.kind == SEND:
            return f"{self.channel}!"
        if self.kind == RECEIVE:
            return f"{self.channel}?"
        return ''


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    guard: Guard = Guard()
    sync: Sync = Sync()
    resets: tuple = ()
    updates: tuple = ()   # ((variable, value), ...)
    label: str = None


@dataclass(frozen=True)
class VariableDecl:
    name: str
    type: str           # 'bool' or 'int'
    initial: int = 0


@dataclass(frozen=True)
class TimedAutomaton:
    name: str
    locations: tuple
    initial: str
    edges: tuple = ()
    clocks: tuple = ()
    variables: tuple = ()
    channels: tuple = ()

    def location(self, location_id):
        for loc in self.locations:
            if loc.id == location_id:
                return loc
        raise KeyError(f"{self.name} has no location '{location_id}'")

    def location_ids(self):
        return [loc.id for loc in self.locations]

    def edge_label(self, edge):
        if edge.label:
            return f"{self.name}.{edge.label}"
        return f"{self.name}.{edge.source}->{edge.target}"

    def reachable_locations(self):
        """Locations connected to the initial one by the edge graph"""
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            current = queue.popleft()
            for edge in self.edges:
                if edge.source == current and edge.target not in seen:
                    seen.add(edge.target)
                    queue.append(edge.target)
        return seen


@dataclass(frozen=True)
class NetworkState:
    """Location vector x variable valuation x clock valuation"""
    locations: tuple
    variables: tuple
    clocks: tuple


@dataclass(frozen=True)
class Transition:
    label: str
    edge_labels: tuple
    state: NetworkState


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.errors

    def __str__(self):
        if self.ok:
            return "OK"
        return "\n".join(self.errors)


# ========== VALIDATION ==========

def collect_declarations(automata, clocks=(), variables=(), channels=()):
    """Merge shared and per-automaton declarations, keeping first-seen order"""

    merged_clocks = list(dict.fromkeys(list(clocks) + [c for a in automata for c in a.clocks]))
    merged_channels = list(dict.fromkeys(list(channels) + [c for a in automata for c in a.channels]))
    merged_vars = {}
    conflicts = []
    for decl in list(variables) + [v for a in automata for v in a.variables]:
        previous = merged_vars.get(decl.name)
        if previous is None:
            merged_vars[decl.name] = decl
        elif previous != decl:
            conflicts.append(f"conflicting declarations of variable '{decl.name}'")
    return merged_clocks, list(merged_vars.values()), merged_channels, conflicts


def validate_network(automata, clocks=(), variables=(), channels=()):
    """
    Check well-formedness of a list of automata plus shared declarations
    Errors are collected, never raised
    """

    report = ValidationReport()
    clock_names, var_decls, channel_names, conflicts = collect_declarations(
        automata, clocks, variables, channels)
    report.errors.extend(conflicts)

    clock_set = set(clock_names)
    var_set = {v.name for v in var_decls}
    chan_set = set(channel_names)

    for name in clock_set & var_set:
        report.errors.append(f"'{name}' declared as both clock and variable")

    names = [a.name for a in automata]
    for name in sorted({n for n in names if names.count(n) > 1}):
        report.errors.append(f"duplicate automaton name '{name}'")

    for automaton in automata:
        where = automaton.name
        ids = automaton.location_ids()
        for loc_id in sorted({i for i in ids if ids.count(i) > 1}):
            report.errors.append(f"{where}: duplicate location '{loc_id}'")
        if automaton.initial not in ids:
            report.errors.append(f"{where}: initial location '{automaton.initial}' does not exist")

        for loc in automaton.locations:
            for c in loc.invariant.conjuncts:
                if c.name not in clock_set:
                    report.errors.append(f"{where}.{loc.id}: undeclared clock '{c.name}' in invariant")
                if c.op != '<=' or isinstance(c.value, bool) or c.value < 0:
                    report.errors.append(
                        f"{where}.{loc.id}: invariant '{c}' is not an upper bound of the form clock<=k")

        directions = {}
        for edge in automaton.edges:
            label = automaton.edge_label(edge)
            for endpoint in (edge.source, edge.target):
                if endpoint not in ids:
                    report.errors.append(f"{label}: dangling edge, no location '{endpoint}'")
            for c in edge.guard.conjuncts:
                if c.name not in clock_set and c.name not in var_set:
                    report.errors.append(f"{label}: undeclared clock or variable '{c.name}' in guard")
                if not isinstance(c.value, bool) and c.value < 0:
                    report.errors.append(f"{label}: negative constant in '{c}'")
            for clock in edge.resets:
                if clock not in clock_set:
                    report.errors.append(f"{label}: undeclared clock '{clock}' in reset")
            for var, _ in edge.updates:
                if var not in var_set:
                    report.errors.append(f"{label}: undeclared variable '{var}' in update")
            if edge.sync.kind != INTERNAL:
                if edge.sync.channel not in chan_set:
                    report.errors.append(f"{label}: undeclared channel '{edge.sync.channel}'")
                directions.setdefault(edge.sync.channel, set()).add(edge.sync.kind)

        for channel, kinds in sorted(directions.items()):
            if len(kinds) > 1:
                report.errors.append(
                    f"{where}: duplicate channel direction, '{channel}' is both sent and received")

        if automaton.initial in ids:
            unreachable = set(ids) - automaton.reachable_locations()
            for loc_id in sorted(unreachable):
                report.warnings.append(f"{where}: location '{loc_id}' not connected to initial location")

    for warning in report.warnings:
        logger.warning(warning)

    return report


# ========== NETWORK ==========

class _CompiledEdge:
    """Edge with names resolved to state indices"""

    __slots__ = ('edge', 'label', 'checks', 'resets', 'updates', 'target')

    def __init__(self, edge, label, checks, resets, updates):
        self.edge = edge
        self.label = label
        self.checks = checks
        self.resets = resets
        self.updates = updates
        self.target = edge.target


class Network:
    """Parallel composition of timed automata over shared declarations"""

    def __init__(self, automata, clocks=(), variables=(), channels=(), ceiling=None, name='network'):
        self.name = name
        self.automata = tuple(automata)
        self.shared_clocks = tuple(clocks)
        self.shared_variables = tuple(variables)
        self.shared_channels = tuple(channels)

        self.report = validate_network(self.automata, clocks, variables, channels)
        if not self.report.ok:
            raise NetworkValidationError(self.report)

        clock_names, var_decls, channel_names, _ = collect_declarations(
            self.automata, clocks, variables, channels)
        self.clocks = tuple(clock_names)
        self.variables = tuple(var_decls)
        self.channels = tuple(channel_names)

        self.clock_index = {c: i for i, c in enumerate(self.clocks)}
        self.var_index = {v.name: i for i, v in enumerate(self.variables)}
        self.var_types = {v.name: v.type for v in self.variables}
        self.automaton_index = {a.name: i for i, a in enumerate(self.automata)}

        self.max_constant = self._max_clock_constant()
        if ceiling is not None and ceiling <= self.max_constant:
            raise ValueError(f"clock ceiling {ceiling} must exceed the largest constant {self.max_constant}")
        self.ceiling = self.max_constant + 1 if ceiling is None else ceiling

        self._invariants = []
        self._urgent = []
        self._internal = []
        self._senders = []
        self._receivers = []
        for automaton in self.automata:
            self._invariants.append({
                loc.id: tuple((self.clock_index[c.name], c.value) for c in loc.invariant.conjuncts)
                for loc in automaton.locations})
            self._urgent.append({loc.id for loc in automaton.locations if loc.urgent})
            internal, senders, receivers = {}, {}, {}
            for edge in automaton.edges:
                compiled = self._compile_edge(automaton, edge)
                if edge.sync.kind == INTERNAL:
                    internal.setdefault(edge.source, []).append(compiled)
                elif edge.sync.kind == SEND:
                    senders.setdefault(edge.source, []).append((edge.sync.channel, compiled))
                else:
                    receivers.setdefault(edge.source, []).append((edge.sync.channel, compiled))
            self._internal.append(internal)
            self._senders.append(senders)
            self._receivers.append(receivers)

    def _max_clock_constant(self):
        constants = [0]
        for automaton in self.automata:
            for loc in automaton.locations:
                constants.extend(c.value for c in loc.invariant.conjuncts)
            for edge in automaton.edges:
                constants.extend(c.value for c in edge.guard.conjuncts if c.name in self.clock_index)
        return max(constants)

    def _compile_edge(self, automaton, edge):
        checks = []
        for c in edge.guard.conjuncts:
            if c.name in self.clock_index:
                checks.append((True, self.clock_index[c.name], OPERATORS[c.op], int(c.value)))
            else:
                checks.append((False, self.var_index[c.name], OPERATORS[c.op], int(c.value)))
        resets = tuple(self.clock_index[c] for c in edge.resets)
        updates = tuple((self.var_index[v], int(value)) for v, value in edge.updates)
        return _CompiledEdge(edge, automaton.edge_label(edge), tuple(checks), resets, updates)

    def with_ceiling(self, ceiling):
        """Same network with a different clock saturation value"""
        return Network(self.automata, self.shared_clocks, self.shared_variables,
                       self.shared_channels, ceiling=ceiling, name=self.name)

    # ---------- state access ----------

    def initial_state(self):
        state = NetworkState(
            locations=tuple(a.initial for a in self.automata),
            variables=tuple(int(v.initial) for v in self.variables),
            clocks=tuple(0 for _ in self.clocks))
        if not self._invariants_hold(state.locations, state.clocks):
            raise LgsError("initial state violates a location invariant")
        return state

    def value(self, state, name):
        """Clock or variable value; booleans come back as bool"""
        if name in self.clock_index:
            return state.clocks[self.clock_index[name]]
        index = self.var_index[name]
        if self.var_types[name] == 'bool':
            return bool(state.variables[index])
        return state.variables[index]

    def location_of(self, state, automaton_name):
        return state.locations[self.automaton_index[automaton_name]]

    def describe(self, state):
        """JSON-ready snapshot of a state"""
        return {
            'locations': {a.name: loc for a, loc in zip(self.automata, state.locations)},
            'variables': {v.name: self.value(state, v.name) for v in self.variables},
            'clocks': {c: state.clocks[i] for i, c in enumerate(self.clocks)},
        }

    def _invariants_hold(self, locations, clocks):
        for i, loc in enumerate(locations):
            for clock, bound in self._invariants[i][loc]:
                if clocks[clock] > bound:
                    return False
        return True

    def _enabled(self, compiled, state):
        for is_clock, index, op, value in compiled.checks:
            current = state.clocks[index] if is_clock else state.variables[index]
            if not op(current, value):
                return False
        return True

    # ---------- successors ----------

    def delay_successor(self, state, d):
        """Advance every clock by d ticks, or None if time cannot pass"""

        if d <= 0:
            raise ValueError("delay must be a positive number of ticks")
        for i, loc in enumerate(state.locations):
            if loc in self._urgent[i]:
                return None
        ceiling = self.ceiling
        clocks = tuple(min(c + d, ceiling) for c in state.clocks)
        # upper-bound invariants are monotone: checking the end point covers every tick
        if not self._invariants_hold(state.locations, clocks):
            return None
        return NetworkState(state.locations, state.variables, clocks)

    def _apply(self, state, moves):
        locations = list(state.locations)
        variables = list(state.variables)
        clocks = list(state.clocks)
        for automaton_pos, compiled in moves:
            locations[automaton_pos] = compiled.target
            for clock in compiled.resets:
                clocks[clock] = 0
            for index, value in compiled.updates:
                variables[index] = value
        locations = tuple(locations)
        clocks = tuple(clocks)
        if not self._invariants_hold(locations, clocks):
            return None
        return NetworkState(locations, tuple(variables), clocks)

    def discrete_successors(self, state):
        """
        Enabled internal edges plus binary send/receive pairs
        Order: automata in declaration order, edges in file order
        """

        result = []
        for i, loc in enumerate(state.locations):
            for compiled in self._internal[i].get(loc, ()):
                if self._enabled(compiled, state):
                    target = self._apply(state, [(i, compiled)])
                    if target is not None:
                        result.append(Transition(compiled.label, (compiled.label,), target))

        for i, loc in enumerate(state.locations):
            for channel, sender in self._senders[i].get(loc, ()):
                if not self._enabled(sender, state):
                    continue
                for j, other_loc in enumerate(state.locations):
                    if j == i:
                        continue
                    for other_channel, receiver in self._receivers[j].get(other_loc, ()):
                        if other_channel != channel or not self._enabled(receiver, state):
                            continue
                        # sender updates are applied before receiver updates
                        target = self._apply(state, [(i, sender), (j, receiver)])
                        if target is not None:
                            label = f"{channel}: {sender.label} | {receiver.label}"
                            result.append(Transition(label, (sender.label, receiver.label), target))
        return result

    def successors(self, state):
        """Discrete successors first, then the unit delay"""
        result = self.discrete_successors(state)
        delayed = self.delay_successor(state, 1)
        if delayed is not None:
            result.append(Transition('delay(1)', (), delayed))
        return result


# ========== TEXT FORMAT ==========

_EDGE = re.compile(r'^edge\s+(\S+)\s*->\s*(\S+)(.*)$')
_EDGE_KEYWORDS = re.compile(r'\s+(guard|sync|reset|set|label)\s+')


def _parse_edge(line, line_no):
    match = _EDGE.match(line)
    if not match:
        raise ModelFormatError(f"bad edge declaration '{line}'", line_no)
    source, target, rest = match.groups()
    parts = _EDGE_KEYWORDS.split(' ' + rest + ' ')
    if parts[0].strip():
        raise ModelFormatError(f"unexpected text '{parts[0].strip()}'", line_no)

    guard, sync, resets, updates, label = Guard(), Sync(), (), (), None
    for keyword, body in zip(parts[1::2], parts[2::2]):
        body = body.strip()
        if keyword == 'guard':
            guard = Guard.parse(body)
        elif keyword == 'sync':
            if body.endswith('!'):
                sync = Sync(SEND, body[:-1])
            elif body.endswith('?'):
                sync = Sync(RECEIVE, body[:-1])
            else:
                raise ModelFormatError(f"sync '{body}' must end with ! or ?", line_no)
        elif keyword == 'reset':
            resets = tuple(c.strip() for c in body.split(',') if c.strip())
        elif keyword == 'set':
            pairs = []
            for assignment in body.split(','):
                if '=' not in assignment:
                    raise ModelFormatError(f"bad assignment '{assignment}'", line_no)
                var, value = assignment.split('=', 1)
                pairs.append((var.strip(), parse_literal(value)))
            updates = tuple(pairs)
        else:
            label = body
    return Edge(source, target, guard, sync, resets, updates, label)


def parse_network(text, name='network'):
    """Read the one-declaration-per-line model format"""

    shared = {'clocks': [], 'variables': [], 'channels': []}
    automata = []
    current = None

    def finish():
        if current is not None:
            if current['initial'] is None:
                raise ModelFormatError(f"automaton '{current['name']}' has no init line")
            automata.append(TimedAutomaton(
                name=current['name'],
                locations=tuple(current['locations']),
                initial=current['initial'],
                edges=tuple(current['edges']),
                clocks=tuple(current['clocks']),
                variables=tuple(current['variables']),
                channels=tuple(current['channels'])))

    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        keyword = line.split()[0]
        scope = current if current is not None else shared

        try:
            if keyword == 'automaton':
                finish()
                current = {'name': line.split()[1], 'locations': [], 'initial': None,
                           'edges': [], 'clocks': [], 'variables': [], 'channels': []}
            elif keyword == 'clock':
                scope['clocks'].append(line.split()[1])
            elif keyword == 'chan':
                scope['channels'].append(line.split()[1])
            elif keyword == 'var':
                match = re.match(r'^var\s+(bool|int)\s+(\w+)\s*=\s*(\S+)$', line)
                if not match:
                    raise ModelFormatError(f"bad variable declaration '{line}'", line_no)
                var_type, var_name, initial = match.groups()
                scope['variables'].append(VariableDecl(var_name, var_type, parse_literal(initial)))
            elif current is None:
                raise ModelFormatError(f"'{keyword}' outside of an automaton", line_no)
            elif keyword == 'loc':
                tokens = line.split(None, 2)
                rest = tokens[2] if len(tokens) > 2 else ''
                urgent = False
                if rest.startswith('urgent'):
                    urgent = True
                    rest = rest[len('urgent'):].strip()
                invariant = Guard()
                if rest.startswith('inv'):
                    invariant = Guard.parse(rest[len('inv'):])
                elif rest:
                    raise ModelFormatError(f"unexpected text '{rest}'", line_no)
                current['locations'].append(Location(tokens[1], invariant, urgent))
            elif keyword == 'init':
                current['initial'] = line.split()[1]
            elif keyword == 'edge':
                current['edges'].append(_parse_edge(line, line_no))
            else:
                raise ModelFormatError(f"unknown keyword '{keyword}'", line_no)
        except ModelFormatError as error:
            if error.line is None:
                raise ModelFormatError(str(error), line_no) from None
            raise
        except (IndexError, ValueError):
            raise ModelFormatError(f"malformed line '{line}'", line_no) from None

    finish()
    return Network(automata, shared['clocks'], shared['variables'], shared['channels'], name=name)


def _dump_declarations(lines, clocks, variables, channels, indent=''):
    for clock in clocks:
        lines.append(f"{indent}clock {clock}")
    for var in variables:
        lines.append(f"{indent}var {var.type} {var.name} = {format_literal(var.initial if var.type == 'int' else bool(var.initial))}")
    for channel in channels:
        lines.append(f"{indent}chan {channel}")


def dump_automaton(automaton, lines=None):
    lines = [] if lines is None else lines
    lines.append(f"automaton {automaton.name}")
    _dump_declarations(lines, automaton.clocks, automaton.variables, automaton.channels, '  ')
    for loc in automaton.locations:
        text = f"  loc {loc.id}"
        if loc.urgent:
            text += " urgent"
        if loc.invariant.conjuncts:
            text += f" inv {loc.invariant}"
        lines.append(text)
    lines.append(f"  init {automaton.initial}")
    for edge in automaton.edges:
        text = f"  edge {edge.source} -> {edge.target}"
        if edge.guard.conjuncts:
            text += f" guard {edge.guard}"
        if edge.sync.kind != INTERNAL:
            text += f" sync {edge.sync}"
        if edge.resets:
            text += f" reset {','.join(edge.resets)}"
        if edge.updates:
            text += " set " + ','.join(f"{v}={format_literal(x)}" for v, x in edge.updates)
        if edge.label:
            text += f" label {edge.label}"
        lines.append(text)
    return lines


def dump_network(network):
    """Render a network in the text model format"""

    lines = [f"# {network.name}"]
    _dump_declarations(lines, network.shared_clocks, network.shared_variables, network.shared_channels)
    for automaton in network.automata:
        lines.append("")
        dump_automaton(automaton, lines)
    return "\n".join(lines) + "\n"


# ========== DOT EXPORT ==========

def _gvquote(s):
    return '"{}"'.format(s.replace('"', r'\"'))


def network_to_dot(network):
    """
    Produce a graphviz dot description of the automata (one cluster each)
    as an iterable of strings
    """

    yield "digraph network {\n"
    yield "  rankdir=LR;\n"
    for automaton in network.automata:
        yield f"  subgraph {_gvquote('cluster_' + automaton.name)} {{\n"
        yield f"    label={_gvquote(automaton.name)};\n"
        for loc in automaton.locations:
            node = _gvquote(f"{automaton.name}.{loc.id}")
            shape = "doublecircle" if loc.id == automaton.initial else "circle"
            label = loc.id
            if loc.invariant.conjuncts:
                label += f"\\n{loc.invariant}"
            style = ' style="dashed"' if loc.urgent else ''
            yield f"    {node} [shape={shape} label={_gvquote(label)}{style}];\n"
        for edge in automaton.edges:
            parts = []
            if edge.guard.conjuncts:
                parts.append(str(edge.guard))
            if edge.sync.kind != INTERNAL:
                parts.append(str(edge.sync))
            if edge.resets:
                parts.append(','.join(f"{c}:=0" for c in edge.resets))
            if edge.updates:
                parts.append(','.join(f"{v}:={format_literal(x)}" for v, x in edge.updates))
            yield "    {} -> {} [label={}];\n".format(
                _gvquote(f"{automaton.name}.{edge.source}"),
                _gvquote(f"{automaton.name}.{edge.target}"),
                _gvquote("\\n".join(parts)))
        yield "  }\n"
    yield "}\n"
