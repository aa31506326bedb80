"""
Property Language Module
PSL-style property parser, query compiler and the named predicate library
"""

import logging
import re
from dataclasses import dataclass, field

from ta_core import LgsError, OPERATORS, format_literal

logger = logging.getLogger(__name__)


class PropertySyntaxError(LgsError):
    """Malformed property text"""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class UnresolvedAtomError(LgsError):
    """Atom names something the network does not declare"""


class UnsupportedNestingError(LgsError):
    """Nested path quantifier or implication"""


QUANTIFIERS = ('AG', 'EG', 'EF', 'AF')
DECLARATION_TYPES = ('boolean', 'integer', 'clock')


# ========== EXPRESSIONS ==========

@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Compare:
    name: str
    op: str
    value: object


@dataclass(frozen=True)
class LocRef:
    automaton: str
    location: str


@dataclass(frozen=True)
class PredRef:
    name: str


@dataclass(frozen=True)
class Not:
    operand: object


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Implies:
    """Only produced by compilation (not p) or q"""
    antecedent: object
    consequent: object


def conjoin(items):
    flat = []
    for item in items:
        flat.extend(item.items if isinstance(item, And) else (item,))
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disjoin(items):
    flat = []
    for item in items:
        flat.extend(item.items if isinstance(item, Or) else (item,))
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


@dataclass(frozen=True)
class PropertyAst:
    name: str
    quantifier: str
    antecedent: object
    consequent: object = None
    facet: str = None
    line: int = field(default=None, compare=False)


@dataclass(frozen=True)
class Declaration:
    """Typed name list such as P36 = boolean door_locked, ...;"""
    name: str
    kind: str
    names: tuple
    arrays: tuple = ()
    facet: str = None
    line: int = field(default=None, compare=False)


@dataclass
class PropertyFile:
    properties: list
    declarations: list

    def by_name(self):
        return {item.name: item for item in self.properties + self.declarations}


# ========== LEXER ==========

_TOKEN = re.compile(r"""
    (?P<comment>/\*.*?\*/)
  | (?P<space>\s+)
  | (?P<number>-?\d+(?![\w.]))
  | (?P<name>[A-Za-z_]\w*(?:\.\w+)?\*?)
  | (?P<op>->|&&|\|\||==|!=|<=|>=|\[\]|[<>!()=;,])
""", re.VERBOSE | re.DOTALL)

_FACET_COMMENT = re.compile(r'/\*\s*facet\s*:\s*(\w+)\s*\*/', re.IGNORECASE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise PropertySyntaxError(f"unexpected character '{text[pos]}'", line, pos - line_start + 1)
        kind = match.lastgroup
        value = match.group()
        column = pos - line_start + 1
        if kind == 'comment':
            facet = _FACET_COMMENT.fullmatch(value)
            if facet:
                tokens.append(Token('facet', facet.group(1).upper(), line, column))
        elif kind != 'space':
            tokens.append(Token(kind, value, line, column))
        newlines = value.count('\n')
        if newlines:
            line += newlines
            line_start = pos + value.rfind('\n') + 1
        pos = match.end()
    tokens.append(Token('end', '', line, pos - line_start + 1))
    return tokens


def canonical_name(raw):
    """p4.1 -> P4.1; other names are kept"""
    if re.match(r'^[pP]\d', raw):
        return 'P' + raw[1:]
    return raw


# ========== PARSER ==========

class _Parser:

    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, message, token=None):
        token = token or self.current
        return PropertySyntaxError(message, token.line, token.column)

    def expect(self, text):
        if self.current.text != text:
            shown = self.current.text or 'end of input'
            raise self.error(f"expected '{text}', got '{shown}'")
        return self.advance()

    def accept(self, text):
        if self.current.text == text and self.current.kind in ('op', 'name'):
            return self.advance()
        return None

    # ---------- statements ----------

    def parse_file(self):
        properties, declarations = [], []
        facet = None
        while self.current.kind != 'end':
            if self.current.kind == 'facet':
                facet = self.advance().text
                continue
            item = self.parse_statement(facet)
            facet = None
            (declarations if isinstance(item, Declaration) else properties).append(item)
        return PropertyFile(properties, declarations)

    def parse_statement(self, facet=None):
        if self.current.text == 'assert':
            self.advance()
            self.expect('property')
        name_token = self.current
        if name_token.kind != 'name':
            raise self.error(f"expected a property name, got '{name_token.text or 'end of input'}'")
        self.advance()
        self.expect('=')
        head = self.current
        if head.kind == 'name' and head.text in DECLARATION_TYPES:
            return self.parse_declaration(name_token, facet)
        if head.kind != 'name' or head.text not in QUANTIFIERS:
            raise self.error(f"unknown quantifier '{head.text or 'end of input'}'", head)
        self.advance()
        antecedent = self.parse_or()
        consequent = None
        if self.accept('->'):
            consequent = self.parse_or()
        if self.current.text == '->':
            raise UnsupportedNestingError(
                f"line {self.current.line}: chained implication is not supported")
        self.expect(';')
        return PropertyAst(canonical_name(name_token.text), head.text, antecedent, consequent,
                           facet, name_token.line)

    def parse_declaration(self, name_token, facet):
        kind = self.advance().text
        names, arrays = [], []
        while True:
            token = self.current
            if token.kind != 'name':
                raise self.error(f"expected a declared name, got '{token.text or 'end of input'}'")
            self.advance()
            names.append(token.text)
            if self.accept('[]'):
                arrays.append(token.text)
            if not self.accept(','):
                break
        self.expect(';')
        return Declaration(canonical_name(name_token.text), kind, tuple(names), tuple(arrays),
                           facet, name_token.line)

    # ---------- expressions ----------

    def parse_or(self):
        items = [self.parse_and()]
        while self.accept('||'):
            items.append(self.parse_and())
        return disjoin(items)

    def parse_and(self):
        items = [self.parse_unary()]
        while self.accept('&&'):
            items.append(self.parse_unary())
        return conjoin(items)

    def parse_unary(self):
        if self.accept('!'):
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self):
        token = self.current
        if self.accept('('):
            inner = self.parse_or()
            if self.current.text == '->':
                raise UnsupportedNestingError(
                    f"line {self.current.line}: implication inside parentheses is not supported")
            self.expect(')')
            return inner
        if token.kind != 'name':
            raise self.error(f"expected an expression, got '{token.text or 'end of input'}'")
        self.advance()
        text = token.text
        if text in QUANTIFIERS:
            raise UnsupportedNestingError(
                f"line {token.line}: nested path quantifier '{text}' is not supported")
        if text in ('true', 'false'):
            return Const(text == 'true')
        if text.endswith('*'):
            return PredRef(canonical_name(text))
        if self.current.kind == 'op' and self.current.text in OPERATORS:
            op = self.advance().text
            return Compare(text, op, self.parse_literal())
        if '.' in text:
            automaton, location = text.split('.', 1)
            return LocRef(automaton, location)
        return Compare(text, '==', True)

    def parse_literal(self):
        token = self.current
        if token.kind == 'number':
            self.advance()
            return int(token.text)
        if token.text in ('true', 'false'):
            self.advance()
            return token.text == 'true'
        raise self.error(f"expected a literal, got '{token.text or 'end of input'}'")


def parse_property_file(text):
    """Properties and typed declarations, in file order"""
    return _Parser(tokenize(text)).parse_file()


def parse_properties(text):
    """One PropertyAst per `name = QUANT expr [-> expr];` clause"""
    return parse_property_file(text).properties


def parse_expression(text):
    parser = _Parser(tokenize(text))
    expr = parser.parse_or()
    if parser.current.kind != 'end':
        raise parser.error(f"unexpected '{parser.current.text}'")
    return expr


# ========== QUERY SYNTAX ==========

_QUERY_HEADS = (('A[]', 'AG'), ('E<>', 'EF'), ('A<>', 'AF'), ('E[]', 'EG'))
_QUERY_WORDS = (('imply', '->'), ('and', '&&'), ('or', '||'), ('not', '!'))


def parse_query(text, name='Q'):
    """
    Parse a model-checker query: A[] p, E<> p, A<> p, E[] p or p --> q,
    with and/or/not/imply as word operators
    """

    body = text.strip()
    quantifier = None
    for head, mapped in _QUERY_HEADS:
        if body.startswith(head):
            quantifier = mapped
            body = body[len(head):]
            break
    for word, symbol in _QUERY_WORDS:
        body = re.sub(rf'\b{word}\b', f' {symbol} ', body)

    if quantifier is None:
        if '-->' not in body:
            raise PropertySyntaxError(f"query '{text}' has no quantifier")
        left, right = body.split('-->', 1)
        return PropertyAst(canonical_name(name), 'AF', parse_expression(left), parse_expression(right))

    parts = body.split('->')
    if len(parts) > 2:
        raise UnsupportedNestingError(f"chained implication in query '{text}'")
    antecedent = parse_expression(parts[0])
    consequent = parse_expression(parts[1]) if len(parts) == 2 else None
    return PropertyAst(canonical_name(name), quantifier, antecedent, consequent)


# ========== PRINTING ==========

def format_expression(expr, words=False):
    """Render an expression in property syntax, or query syntax with words=True"""

    and_op, or_op, not_op = (' and ', ' or ', 'not ') if words else (' && ', ' || ', '!')

    def render(node, parent=None):
        if isinstance(node, Const):
            return format_literal(node.value)
        if isinstance(node, Compare):
            return f"{node.name}{node.op}{format_literal(node.value)}"
        if isinstance(node, LocRef):
            return f"{node.automaton}.{node.location}"
        if isinstance(node, PredRef):
            return node.name
        if isinstance(node, Not):
            inner = render(node.operand, 'not')
            if isinstance(node.operand, (And, Or, Implies)):
                inner = f"({inner})"
            return not_op + inner
        if isinstance(node, And):
            text = and_op.join(render(item, 'and') for item in node.items)
            return text
        if isinstance(node, Or):
            text = or_op.join(render(item, 'or') for item in node.items)
            return f"({text})" if parent == 'and' else text
        if isinstance(node, Implies):
            left = render(node.antecedent, 'imply')
            right = render(node.consequent, 'imply')
            arrow = ' imply ' if words else ' -> '
            return left + arrow + right
        raise TypeError(f"not an expression: {node!r}")

    return render(expr)


def format_property(ast):
    """Inverse of parse_properties for a single clause"""

    prefix = f"/*facet: {ast.facet}*/ " if ast.facet else ''
    body = format_expression(ast.antecedent)
    if ast.consequent is not None:
        body += ' -> ' + format_expression(ast.consequent)
    return f"{prefix}{ast.name} = {ast.quantifier} {body};"


def format_declaration(decl):
    names = ', '.join(n + '[]' if n in decl.arrays else n for n in decl.names)
    return f"{decl.name} = {decl.kind} {names};"


# ========== PREDICATES ==========

PREDICATE_DEFINITIONS = {
    'P1*': ('The door is completely open.', 'door_open==true'),
    'P2*': ('The door is not completely open.', 'door_open==false'),
    'P3*': ('The door is not closed.', 'door_closed==false'),
    'P4*': ('The door is closed.', 'door_closed==true'),
    'P5*': ('The door is locked.', 'door_locked==true'),
    'P6*': ('The door is unlocked.', 'door_locked==false'),
    'P7*': ('The door is manoeuvring from high to down.', 'door_m_highdown==true'),
    'P8*': ('The door is not manoeuvring from high to down.', 'door_m_highdown==false'),
    'P9*': ('The door is manoeuvring from down to high.', 'door_m_downhigh==true'),
    'P10*': ('The door is not manoeuvring from down to high.', 'door_m_downhigh==false'),
    'P11*': ('There is a failure in the door.', 'failure_door==true'),
    'P12*': ('There is no failure in the door.', 'failure_door==false'),
    'P13*': ('There is a failure in the gear.', 'failure_gear==true'),
    'P14*': ('There is no failure in the gear.', 'failure_gear==false'),
    'P15*': ('The gear is locked in high position.', 'gear_locked_high==true'),
    'P16*': ('The gear is not locked in high position.', 'gear_locked_high==false'),
    'P17*': ('The gear is locked in down position.', 'gear_locked_down==true'),
    'P18*': ('The gear is not locked in down position.', 'gear_locked_down==false'),
    'P19*': ('The gear is manoeuvring from high to down position.', 'gear_m_highdown==true'),
    'P20*': ('The gear is not manoeuvring from high to down position.', 'gear_m_highdown==false'),
    'P21*': ('The gear is manoeuvring from down to high position.', 'gear_m_downhigh==true'),
    'P22*': ('The gear is not manoeuvring from down to high position.', 'gear_m_downhigh==false'),
    'P23*': ('The gear is fully retracted.', 'full_gear_retraction==true'),
    'P24*': ('The gear is not fully retracted.', 'full_gear_retraction==false'),
    'P25*': ('The gear is fully extended.', 'full_gear_extension==true'),
    'P26*': ('The gear is not fully extended.', 'full_gear_extension==false'),
    'P27*': ('There is no light on in the pilot interface.', 'interface.none'),
    'P28*': ('The red light is on in the pilot interface.', 'interface.red'),
    'P29*': ('The orange light is on in the pilot interface.', 'interface.orange'),
    'P30*': ('The green light is on in the pilot interface.', 'interface.green'),
    'P31*': ('The actuator position is up.', 'actuator_position==false'),
    'P32*': ('The actuator position is down.', 'actuator_position==true'),
    'P33*': ('The speed is between 1 and 4.', 'speed>=1 && speed<=4'),
    'P34*': ('The height is between 1 and 4.', 'height>=1 && height<=4'),
}

COMPLEMENTARY_PAIRS = tuple((f"P{k}*", f"P{k + 1}*") for k in range(1, 27, 2)) + (('P31*', 'P32*'),)


@dataclass(frozen=True)
class Predicate:
    """Compiled state predicate; calling it on a NetworkState gives a bool"""
    expr: object
    fn: object = field(compare=False, repr=False)

    def __call__(self, state):
        return self.fn(state)

    def __str__(self):
        return format_expression(self.expr)


class PredicateTable(dict):
    """Predicate name -> Predicate, with the prose description of each"""

    def __init__(self, predicates, descriptions):
        super().__init__(predicates)
        self.descriptions = descriptions


def builtin_predicates(network):
    """Table of P1*..P34* compiled against the assembled network"""

    predicates = {}
    for name, (_, text) in PREDICATE_DEFINITIONS.items():
        expr = parse_expression(text)
        predicates[name] = Predicate(expr, _compile(expr, network, {}))
    descriptions = {name: description for name, (description, _) in PREDICATE_DEFINITIONS.items()}
    return PredicateTable(predicates, descriptions)


def _compile(expr, network, predicates):
    if isinstance(expr, Const):
        value = expr.value
        return lambda s: value
    if isinstance(expr, Compare):
        op = OPERATORS[expr.op]
        bound = int(expr.value)
        if expr.name in network.clock_index:
            index = network.clock_index[expr.name]
            return lambda s: op(s.clocks[index], bound)
        if expr.name in network.var_index:
            index = network.var_index[expr.name]
            return lambda s: op(s.variables[index], bound)
        raise UnresolvedAtomError(f"unresolved atom '{expr.name}'")
    if isinstance(expr, LocRef):
        if expr.automaton not in network.automaton_index:
            raise UnresolvedAtomError(f"unresolved automaton '{expr.automaton}'")
        automaton_pos = network.automaton_index[expr.automaton]
        if expr.location not in network.automata[automaton_pos].location_ids():
            raise UnresolvedAtomError(f"unresolved location '{expr.automaton}.{expr.location}'")
        location = expr.location
        return lambda s: s.locations[automaton_pos] == location
    if isinstance(expr, PredRef):
        if not predicates:
            predicates.update(builtin_predicates(network))
        if expr.name not in predicates:
            raise UnresolvedAtomError(f"unresolved predicate '{expr.name}'")
        return predicates[expr.name].fn
    if isinstance(expr, Not):
        inner = _compile(expr.operand, network, predicates)
        return lambda s: not inner(s)
    if isinstance(expr, And):
        parts = tuple(_compile(item, network, predicates) for item in expr.items)
        return lambda s: all(part(s) for part in parts)
    if isinstance(expr, Or):
        parts = tuple(_compile(item, network, predicates) for item in expr.items)
        return lambda s: any(part(s) for part in parts)
    if isinstance(expr, Implies):
        left = _compile(expr.antecedent, network, predicates)
        right = _compile(expr.consequent, network, predicates)
        return lambda s: not left(s) or right(s)
    raise TypeError(f"not an expression: {expr!r}")


def compile_predicate(expr, network):
    return Predicate(expr, _compile(expr, network, {}))


# ========== QUERIES ==========

@dataclass(frozen=True)
class Invariant:
    """phi holds in every reachable state; vacuity, when set, must be reachable"""
    name: str
    phi: Predicate
    vacuity: Predicate = None
    kind = 'invariant'


@dataclass(frozen=True)
class Reachable:
    name: str
    phi: Predicate
    kind = 'reachable'


@dataclass(frozen=True)
class LeadsTo:
    name: str
    p: Predicate
    q: Predicate
    kind = 'leads-to'


@dataclass(frozen=True)
class BoundedWitness:
    """A reachable state where p and q hold together"""
    name: str
    p: Predicate
    q: Predicate
    kind = 'witness'


def expression_atoms(expr):
    """Compare and LocRef leaves, left to right"""
    if isinstance(expr, (Compare, LocRef, PredRef, Const)):
        return [expr]
    if isinstance(expr, Not):
        return expression_atoms(expr.operand)
    if isinstance(expr, (And, Or)):
        return [atom for item in expr.items for atom in expression_atoms(item)]
    if isinstance(expr, Implies):
        return expression_atoms(expr.antecedent) + expression_atoms(expr.consequent)
    return []


def has_clock_equality(expr, clocks):
    return any(isinstance(a, Compare) and a.op == '==' and a.name in clocks
               for a in expression_atoms(expr))


def compile_property(ast, network):
    """
    AG p -> Invariant(p); AG p -> q -> Invariant(not p or q);
    a clock equality in q -> BoundedWitness(p, q); EG p -> q -> BoundedWitness;
    a witness is a single reachable state satisfying p and q;
    EF p -> q -> Invariant(not p or q) with Reachable(p) as vacuity check;
    EF p, EG p -> Reachable(p); AF p -> LeadsTo(true, p)
    """

    table = {}
    p = Predicate(ast.antecedent, _compile(ast.antecedent, network, table))
    if ast.consequent is None:
        if ast.quantifier == 'AG':
            return Invariant(ast.name, p)
        if ast.quantifier == 'AF':
            return LeadsTo(ast.name, compile_predicate(Const(True), network), p)
        return Reachable(ast.name, p)

    q = Predicate(ast.consequent, _compile(ast.consequent, network, table))
    if ast.quantifier == 'AF':
        return LeadsTo(ast.name, p, q)
    if ast.quantifier == 'EG' or has_clock_equality(ast.consequent, network.clock_index):
        return BoundedWitness(ast.name, p, q)
    implication = Implies(ast.antecedent, ast.consequent)
    phi = Predicate(implication, _compile(implication, network, table))
    if ast.quantifier == 'EF':
        return Invariant(ast.name, phi, vacuity=p)
    return Invariant(ast.name, phi)


def to_query_text(query):
    """Render a compiled query in model-checker query syntax"""

    if isinstance(query, Invariant):
        return f"A[] {format_expression(query.phi.expr, words=True)}"
    if isinstance(query, Reachable):
        return f"E<> {format_expression(query.phi.expr, words=True)}"
    if isinstance(query, LeadsTo):
        return (f"{format_expression(query.p.expr, words=True)} --> "
                f"{format_expression(query.q.expr, words=True)}")
    if isinstance(query, BoundedWitness):
        both = conjoin([query.p.expr, query.q.expr])
        return f"E<> {format_expression(both, words=True)}"
    raise TypeError(f"not a query: {query!r}")


# ========== WEAK VARIANTS ==========

def _strip_clocks(expr, clocks):
    if isinstance(expr, Compare) and expr.name in clocks:
        return None
    if isinstance(expr, Not):
        inner = _strip_clocks(expr.operand, clocks)
        return None if inner is None else Not(inner)
    if isinstance(expr, (And, Or)):
        items = [i for i in (_strip_clocks(item, clocks) for item in expr.items) if i is not None]
        if not items:
            return None
        return conjoin(items) if isinstance(expr, And) else disjoin(items)
    return expr


def weaken_property(ast, clocks=('ck_door', 'ck_gear')):
    """
    The 'bis' variant: the same property without its quantitative clock bounds.
    Timed witness properties stay witness queries.
    """

    timed = ast.consequent is not None and has_clock_equality(ast.consequent, clocks)
    antecedent = _strip_clocks(ast.antecedent, clocks) or Const(True)
    consequent = None
    if ast.consequent is not None:
        consequent = _strip_clocks(ast.consequent, clocks) or Const(True)
    quantifier = 'EG' if timed else ast.quantifier
    return PropertyAst(f"{ast.name}bis", quantifier, antecedent, consequent, ast.facet, ast.line)


def property_variables(ast_or_expr, network=None):
    """Variable and clock names referenced by a property (location refs excluded)"""

    if isinstance(ast_or_expr, PropertyAst):
        atoms = expression_atoms(ast_or_expr.antecedent)
        if ast_or_expr.consequent is not None:
            atoms += expression_atoms(ast_or_expr.consequent)
    else:
        atoms = expression_atoms(ast_or_expr)
    names = [a.name for a in atoms if isinstance(a, Compare)]
    if network is not None:
        names = [n for n in names if n in network.clock_index or n in network.var_index]
    return list(dict.fromkeys(names))


def positive_constraints(ast):
    """Comparisons that sit directly in the top-level conjunctions of either side"""

    result = []
    for side in (ast.antecedent, ast.consequent):
        if side is None:
            continue
        items = side.items if isinstance(side, And) else (side,)
        result.extend(item for item in items if isinstance(item, Compare))
    return result
