"""
ProMeLa Bridge Module
Subset parser and control-flow translation into a clock-free timed automaton
"""

import logging
import re
from collections import deque
from dataclasses import dataclass
from itertools import product

from prop_lang import And, Compare, Const, Not, Or, PropertySyntaxError, parse_expression
from ta_core import (
    Constraint, Edge, Guard, INTERNAL, LgsError, Location, RECEIVE, SEND, Sync,
    TimedAutomaton, VariableDecl, OPERATORS,
)

logger = logging.getLogger(__name__)


class PmlSyntaxError(LgsError):
    """Malformed ProMeLa text"""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class UnsupportedConstructError(PmlSyntaxError):
    """Valid ProMeLa outside the translated subset"""


UNSUPPORTED = ('unless', 'atomic', 'd_step', 'run', 'else', 'timeout', 'printf', 'mtype',
               'typedef', 'inline', 'assert', 'init', 'provided', 'never', 'select', 'for')
TYPES = {'bool': 'bool', 'bit': 'bool', 'byte': 'int', 'short': 'int', 'int': 'int'}
SEPARATORS = (';', '->')
NEGATED = {'==': '!=', '!=': '==', '<': '>=', '<=': '>', '>': '<=', '>=': '<'}


# ========== AST ==========

@dataclass(frozen=True)
class Skip:
    line: int
    column: int


@dataclass(frozen=True)
class Assign:
    variable: str
    value: object
    line: int
    column: int


@dataclass(frozen=True)
class Send:
    channel: str
    line: int
    column: int


@dataclass(frozen=True)
class Receive:
    channel: str
    line: int
    column: int


@dataclass(frozen=True)
class Condition:
    """Guard statement; disjuncts is a tuple of Constraint conjunctions"""
    disjuncts: tuple
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class Branching:
    kind: str       # 'if' or 'do'
    options: tuple
    line: int
    column: int


@dataclass(frozen=True)
class Break:
    line: int
    column: int


@dataclass(frozen=True)
class Goto:
    label: str
    line: int
    column: int


@dataclass(frozen=True)
class Labeled:
    label: str
    statement: object
    line: int
    column: int


@dataclass(frozen=True)
class PmlProcess:
    name: str
    variables: tuple
    channels: tuple
    body: tuple
    line: int = 1
    column: int = 1
    active: bool = False

    def labels(self):
        return [s.label for s in walk(self.body) if isinstance(s, Labeled)]

    def branchings(self, kind=None):
        return [s for s in walk(self.body)
                if isinstance(s, Branching) and (kind is None or s.kind == kind)]


def walk(statements):
    for statement in statements:
        yield statement
        if isinstance(statement, Labeled):
            yield from walk((statement.statement,))
        elif isinstance(statement, Branching):
            for option in statement.options:
                yield from walk(option)


# ========== LEXER ==========

_TOKEN = re.compile(r"""
    (?P<comment>/\*.*?\*/|//[^\n]*)
  | (?P<space>\s+)
  | (?P<number>\d+)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>::|->|==|!=|<=|>=|&&|\|\||[-+*/<>!?=;:,(){}\[\]])
""", re.VERBOSE | re.DOTALL)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise PmlSyntaxError(f"unexpected character '{text[pos]}'", line, pos - line_start + 1)
        value = match.group()
        if match.lastgroup not in ('comment', 'space'):
            tokens.append(_Token(match.lastgroup, value, line, pos - line_start + 1))
        if '\n' in value:
            line += value.count('\n')
            line_start = pos + value.rfind('\n') + 1
        pos = match.end()
    tokens.append(_Token('end', '', line, pos - line_start + 1))
    return tokens


# ========== PARSER ==========

class _PmlParser:

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables = {}
        self.channels = []

    @property
    def current(self):
        return self.tokens[self.pos]

    def peek(self, offset=1):
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, message, token=None, unsupported=False):
        token = token or self.current
        cls = UnsupportedConstructError if unsupported else PmlSyntaxError
        return cls(message, token.line, token.column)

    def expect(self, text):
        if self.current.text != text:
            raise self.error(f"expected '{text}', got '{self.current.text or 'end of input'}'")
        return self.advance()

    def check_supported(self):
        if self.current.kind == 'name' and self.current.text in UNSUPPORTED:
            raise self.error(f"unsupported construct '{self.current.text}'", unsupported=True)

    # ---------- declarations ----------

    def parse_program(self):
        process = None
        while self.current.kind != 'end':
            self.check_supported()
            text = self.current.text
            if text == 'chan':
                self.parse_channel()
            elif text in TYPES:
                self.parse_variable()
            elif text in ('active', 'proctype'):
                if process is not None:
                    raise self.error("only one proctype per file is supported", unsupported=True)
                process = self.parse_proctype()
            elif text == ';':
                self.advance()
            else:
                raise self.error(f"unexpected '{text}' at top level")
        if process is None:
            raise PmlSyntaxError("no proctype found")
        return process

    def parse_channel(self):
        self.expect('chan')
        while True:
            token = self.advance()
            if token.kind != 'name':
                raise self.error("expected a channel name", token)
            if self.current.text == '=':
                # capacity and message types are not modelled
                while self.current.text not in (';', ',') and self.current.kind != 'end':
                    self.advance()
            self.channels.append(token.text)
            if self.current.text != ',':
                break
            self.advance()
        self.expect(';')

    def parse_variable(self):
        kind = TYPES[self.advance().text]
        while True:
            token = self.advance()
            if token.kind != 'name':
                raise self.error("expected a variable name", token)
            initial = False if kind == 'bool' else 0
            if self.current.text == '=':
                self.advance()
                initial = self.parse_literal()
            if token.text in self.variables:
                raise self.error(f"duplicate variable '{token.text}'", token)
            self.variables[token.text] = VariableDecl(token.text, kind, initial)
            if self.current.text != ',':
                break
            self.advance()
        self.expect(';')

    def parse_literal(self):
        token = self.advance()
        if token.text in ('true', 'false'):
            return token.text == 'true'
        sign = 1
        if token.text == '-':
            sign, token = -1, self.advance()
        if token.kind == 'number':
            return sign * int(token.text)
        raise self.error("expected a literal value", token, unsupported=token.kind == 'name')

    def parse_proctype(self):
        start = self.current
        active = False
        if self.current.text == 'active':
            active = True
            self.advance()
            if self.current.text == '[':
                while self.advance().text != ']':
                    pass
        self.expect('proctype')
        name = self.advance()
        if name.kind != 'name':
            raise self.error("expected a process name", name)
        self.expect('(')
        if self.current.text != ')':
            raise self.error("process parameters are not supported", unsupported=True)
        self.expect(')')
        self.expect('{')
        body = self.parse_sequence(('}',))
        self.expect('}')
        process = PmlProcess(name.text, tuple(self.variables.values()), tuple(self.channels),
                             tuple(body), start.line, start.column, active)
        self._check_labels(process)
        return process

    def _check_labels(self, process):
        labels = process.labels()
        duplicates = {label for label in labels if labels.count(label) > 1}
        if duplicates:
            raise PmlSyntaxError(f"duplicate label '{sorted(duplicates)[0]}'")
        for statement in walk(process.body):
            if isinstance(statement, Goto) and statement.label not in labels:
                raise PmlSyntaxError(f"goto target '{statement.label}' does not exist",
                                     statement.line, statement.column)

    # ---------- statements ----------

    def parse_sequence(self, terminators):
        statements = []
        while True:
            while self.current.text in SEPARATORS:
                self.advance()
            if self.current.text in terminators or self.current.text == '::' or self.current.kind == 'end':
                return statements
            if self.current.text in TYPES:
                self.parse_variable()
                continue
            statements.append(self.parse_statement())

    def parse_statement(self):
        self.check_supported()
        token = self.current
        text = token.text
        if token.kind == 'name' and self.peek().text == ':':
            self.advance()
            self.advance()
            while self.current.text in SEPARATORS:
                self.advance()
            return Labeled(text, self.parse_statement(), token.line, token.column)
        if text in ('if', 'do'):
            return self.parse_branching()
        if text == 'skip':
            self.advance()
            return Skip(token.line, token.column)
        if text == 'break':
            self.advance()
            return Break(token.line, token.column)
        if text == 'goto':
            self.advance()
            label = self.advance()
            return Goto(label.text, token.line, token.column)
        if token.kind == 'name' and text in self.channels and self.peek().text in ('!', '?'):
            self.advance()
            direction = self.advance().text
            self.skip_payload()
            cls = Send if direction == '!' else Receive
            return cls(text, token.line, token.column)
        if token.kind == 'name' and self.peek().text == '=':
            self.advance()
            self.advance()
            if text not in self.variables:
                raise self.error(f"assignment to undeclared variable '{text}'", token)
            value = self.parse_literal()
            return Assign(text, value, token.line, token.column)
        return self.parse_condition()

    def skip_payload(self):
        while self.current.text not in SEPARATORS + ('::', 'fi', 'od', '}') and self.current.kind != 'end':
            self.advance()

    def parse_branching(self):
        start = self.advance()
        closing = 'fi' if start.text == 'if' else 'od'
        options = []
        while self.current.text == '::':
            self.advance()
            option = self.parse_sequence((closing,))
            if not option:
                raise self.error("empty option")
            options.append(tuple(option))
        if not options:
            raise self.error(f"'{start.text}' needs at least one '::' option")
        self.expect(closing)
        return Branching(start.text, tuple(options), start.line, start.column)

    def parse_condition(self):
        start = self.current
        parts = []
        depth = 0
        while self.current.kind != 'end':
            text = self.current.text
            if depth == 0 and text in SEPARATORS + ('::', 'fi', 'od', '}'):
                break
            self.check_supported()
            depth += {'(': 1, ')': -1}.get(text, 0)
            parts.append(text)
            self.advance()
        if not parts:
            raise self.error(f"expected a statement, got '{start.text or 'end of input'}'", start)
        text = ' '.join(parts)
        try:
            expr = parse_expression(text)
        except PropertySyntaxError as err:
            raise PmlSyntaxError(f"bad guard '{text}': {err}", start.line, start.column) from None
        disjuncts = self._disjuncts(expr, start)
        for conjunction in disjuncts:
            for c in conjunction:
                if c.name not in self.variables:
                    raise PmlSyntaxError(f"guard uses undeclared variable '{c.name}'",
                                         start.line, start.column)
        return Condition(disjuncts, text, start.line, start.column)

    def _disjuncts(self, expr, token):
        items = expr.items if isinstance(expr, Or) else (expr,)
        result = []
        for item in items:
            conjuncts = item.items if isinstance(item, And) else (item,)
            constraints = []
            for atom in conjuncts:
                if isinstance(atom, Const):
                    if not atom.value:
                        constraints = None
                        break
                    continue
                negate = isinstance(atom, Not)
                if negate:
                    atom = atom.operand
                if not isinstance(atom, Compare):
                    raise self.error("guards must be disjunctions of comparisons", token, unsupported=True)
                op = NEGATED[atom.op] if negate else atom.op
                constraints.append(Constraint(atom.name, op, atom.value))
            if constraints is not None:
                result.append(tuple(constraints))
        return tuple(result)


def parse_pml(text):
    """Parse one proctype (plus its global declarations) of the supported subset"""
    process = _PmlParser(text).parse_program()
    logger.debug("parsed proctype %s", process.name)
    return process


# ========== TRANSLATION ==========

@dataclass
class _Move:
    source: int
    target: int
    guard: tuple = ()
    sync: Sync = Sync()
    updates: tuple = ()
    epsilon: bool = False


class _ControlFlow:

    def __init__(self, process):
        self.names = {}
        self.labels = {}
        self.moves = []
        self.count = 0
        self.gotos = []
        self.initial = self.node(f"P_{process.line}_{process.column}")

    def node(self, name):
        index = self.count
        self.count += 1
        self.names[index] = name
        return index

    def position(self, statement):
        return f"P_{statement.line}_{statement.column}"

    def sequence(self, statements, entry, loop_exit):
        current = entry
        for statement in statements:
            current = self.statement(statement, current, loop_exit)
        return current

    def statement(self, statement, current, loop_exit):
        if isinstance(statement, Labeled):
            if current in self.labels.values():
                aliased = self.node(statement.label)
                self.moves.append(_Move(current, aliased, epsilon=True))
                current = aliased
            else:
                self.names[current] = statement.label
            self.labels[statement.label] = current
            return self.statement(statement.statement, current, loop_exit)
        if isinstance(statement, Condition):
            target = self.node(self.position(statement))
            for conjunction in statement.disjuncts:
                self.moves.append(_Move(current, target, guard=conjunction))
            return target
        if isinstance(statement, (Skip, Assign, Send, Receive)):
            target = self.node(self.position(statement))
            move = _Move(current, target)
            if isinstance(statement, Assign):
                move.updates = ((statement.variable, statement.value),)
            elif isinstance(statement, Send):
                move.sync = Sync(SEND, statement.channel)
            elif isinstance(statement, Receive):
                move.sync = Sync(RECEIVE, statement.channel)
            self.moves.append(move)
            return target
        if isinstance(statement, Goto):
            self.gotos.append((current, statement.label))
            return self.node(self.position(statement))
        if isinstance(statement, Break):
            if loop_exit is None:
                raise PmlSyntaxError("break outside a do-loop", statement.line, statement.column)
            self.moves.append(_Move(current, loop_exit, epsilon=True))
            return self.node(self.position(statement))
        if isinstance(statement, Branching):
            exit_node = self.node(self.position(statement))
            inner_exit = exit_node if statement.kind == 'do' else loop_exit
            for option in statement.options:
                end = self.sequence(option, current, inner_exit)
                back = current if statement.kind == 'do' else exit_node
                self.moves.append(_Move(end, back, epsilon=True))
            return exit_node
        raise TypeError(f"unknown statement {statement!r}")


def _resolve_aliases(flow):
    """Nodes whose only exit is an epsilon move are replaced by their target"""

    real_out = {m.source for m in flow.moves if not m.epsilon}
    alias = {}
    for move in flow.moves:
        if move.epsilon and move.source not in real_out and move.source not in flow.labels.values():
            alias.setdefault(move.source, move.target)

    def final(node):
        seen = set()
        while node in alias and node not in seen:
            seen.add(node)
            node = alias[node]
        return node

    moves = []
    for move in flow.moves:
        if move.epsilon and move.source in alias:
            continue
        move.source, move.target = final(move.source), final(move.target)
        moves.append(move)
    return moves, final(flow.initial)


def _eliminate_epsilon(moves, count):
    """Remaining epsilon moves: copy the real exits of their epsilon closure"""

    epsilon = {}
    for m in moves:
        if m.epsilon:
            epsilon.setdefault(m.source, []).append(m.target)
    if not epsilon:
        return moves
    real = [m for m in moves if not m.epsilon]
    result = list(real)
    for node in range(count):
        closure, queue = set(), deque(epsilon.get(node, ()))
        while queue:
            other = queue.popleft()
            if other in closure or other == node:
                continue
            closure.add(other)
            queue.extend(epsilon.get(other, ()))
        for m in real:
            if m.source in closure:
                result.append(_Move(node, m.target, m.guard, m.sync, m.updates))
    return result


def _merge_guards(moves, initial, labelled):
    """A pure guard move into an anonymous point with a single exit becomes one edge"""

    changed = True
    while changed:
        changed = False
        incoming, outgoing = {}, {}
        for m in moves:
            incoming.setdefault(m.target, []).append(m)
            outgoing.setdefault(m.source, []).append(m)
        for middle, ins in incoming.items():
            outs = outgoing.get(middle, [])
            if middle == initial or middle in labelled or len(outs) != 1 or outs[0].target == middle:
                continue
            if not all(m.sync.kind == INTERNAL and not m.updates for m in ins):
                continue
            after = outs[0]
            merged = [_Move(m.source, after.target, m.guard + after.guard, after.sync, after.updates)
                      for m in ins]
            moves = [m for m in moves if m is not after and m not in ins] + merged
            changed = True
            break
    return moves


def translate(process):
    """
    Control points become locations and statements become edges: guards turn
    into edge guards, channel operations into sync labels, assignments into
    updates; no clocks are introduced
    """

    flow = _ControlFlow(process)
    end = flow.sequence(process.body, flow.initial, None)
    if end not in flow.labels.values():
        flow.names[end] = 'P_end'
    for source, label in flow.gotos:
        flow.moves.append(_Move(source, flow.labels[label], epsilon=True))

    moves, initial = _resolve_aliases(flow)
    moves = _eliminate_epsilon(moves, flow.count)
    moves = _merge_guards(moves, initial, set(flow.labels.values()))

    reachable = {initial}
    queue = deque([initial])
    while queue:
        node = queue.popleft()
        for m in moves:
            if m.source == node and m.target not in reachable:
                reachable.add(m.target)
                queue.append(m.target)

    order = sorted(reachable)
    names = {}
    for node in order:
        name = flow.names[node]
        while name in names.values():
            name += '_'
        names[node] = name

    edges = []
    for m in moves:
        if m.source in reachable:
            edge = Edge(names[m.source], names[m.target], Guard(tuple(m.guard)), m.sync, (), m.updates)
            if edge not in edges:
                edges.append(edge)
    automaton = TimedAutomaton(
        name=process.name,
        locations=tuple(Location(names[n]) for n in order),
        initial=names[initial],
        edges=tuple(edges),
        variables=process.variables,
        channels=process.channels,
    )
    logger.info("translated %s: %d locations, %d edges", process.name,
                len(automaton.locations), len(automaton.edges))
    return automaton


# ========== WEAK BISIMULATION ==========

TAU = 'tau'


def _local_lts(automaton):
    """States (location, local valuation) and labelled moves; foreign guards are open"""

    local = {v.name: i for i, v in enumerate(automaton.variables)}
    start = (automaton.initial, tuple(int(v.initial) for v in automaton.variables))
    states, moves = [start], {}
    index = {start: 0}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        location, values = state
        targets = []
        for edge in automaton.edges:
            if edge.source != location:
                continue
            if not all(OPERATORS[c.op](values[local[c.name]], int(c.value))
                       for c in edge.guard.conjuncts if c.name in local):
                continue
            updated = list(values)
            for name, value in edge.updates:
                if name in local:
                    updated[local[name]] = int(value)
            following = (edge.target, tuple(updated))
            if following not in index:
                index[following] = len(states)
                states.append(following)
                queue.append(following)
            label = TAU if edge.sync.kind == INTERNAL else str(edge.sync)
            targets.append((label, index[following]))
        moves[index[state]] = targets
    return states, moves


def _saturate(moves, count):
    closure = []
    for node in range(count):
        seen, queue = {node}, deque([node])
        while queue:
            current = queue.popleft()
            for label, target in moves.get(current, ()):
                if label == TAU and target not in seen:
                    seen.add(target)
                    queue.append(target)
        closure.append(seen)
    weak = []
    for node in range(count):
        found = {(TAU, t) for t in closure[node]}
        for middle in closure[node]:
            for label, target in moves.get(middle, ()):
                if label != TAU:
                    found.update((label, t) for t in closure[target])
        weak.append(found)
    return weak


def weakly_bisimilar(a, b):
    """Weak bisimilarity of two clock-free automata, tau being unsynchronised edges"""

    states_a, moves_a = _local_lts(a)
    states_b, moves_b = _local_lts(b)
    offset = len(states_a)
    moves = dict(moves_a)
    moves.update({k + offset: [(label, t + offset) for label, t in v] for k, v in moves_b.items()})
    count = offset + len(states_b)
    weak = _saturate(moves, count)

    block = [0] * count
    while True:
        signatures = {}
        refined = []
        for node in range(count):
            signature = (block[node], frozenset((label, block[t]) for label, t in weak[node]))
            refined.append(signatures.setdefault(signature, len(signatures)))
        if len(signatures) == len(set(block)):
            break
        block = refined
    return block[0] == block[offset]


def bisimulation_pairs(a, b):
    """Location pairs of a and b related by the weak bisimulation, for reports"""

    pairs = []
    for location_a, location_b in product(a.location_ids(), b.location_ids()):
        left = TimedAutomaton(a.name, a.locations, location_a, a.edges, (), a.variables, a.channels)
        right = TimedAutomaton(b.name, b.locations, location_b, b.edges, (), b.variables, b.channels)
        if weakly_bisimilar(left, right):
            pairs.append((location_a, location_b))
    return pairs
