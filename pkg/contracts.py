"""
Generalized Contracts Module
Faceted assume/guarantee contracts, composition and layered verification
"""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum

import config
from checker import Verdict, check_properties
from prop_lang import (
    Declaration, PREDICATE_DEFINITIONS, PropertyAst, UnresolvedAtomError, compile_property,
    format_declaration, format_property, parse_expression, parse_property_file,
    positive_constraints, property_variables,
)
from ta_core import LgsError

logger = logging.getLogger(__name__)


class ContractError(LgsError):
    """Malformed or inconsistent contract text"""


class CompositionConflict(LgsError):
    """Shared variables are bound inconsistently; carries the consistency reports"""

    def __init__(self, reports):
        self.reports = reports
        conflicts = [f"{r.facet.name}:{var}" for r in reports
                     for var, finding in r.findings.items() if finding == 'conflict']
        super().__init__("composition refused, conflicting shared variables " + ", ".join(conflicts))


class Facet(Enum):
    DATA = 'DATA'
    SAFETY = 'SAFETY'
    FUNCTIONALITY = 'FUNCTIONALITY'
    ATTAINABILITY = 'ATTAINABILITY'
    LIVENESS = 'LIVENESS'

    @property
    def priority(self):
        return config.FACET_PRIORITIES[self.value]

    @classmethod
    def parse(cls, name):
        try:
            return cls(name.strip().upper())
        except ValueError:
            raise ContractError(f"unknown facet '{name}'") from None


def facets_by_priority():
    return sorted(Facet, key=lambda f: f.priority)


# ========== CONTRACTS ==========

@dataclass
class GeneralizedContract:
    """
    Facet -> list of groups per side; a group is a tuple of term names joined
    by '&', groups of one facet are joined by conjunction
    """
    name: str = 'contract'
    assumptions: dict = field(default_factory=dict)
    guarantees: dict = field(default_factory=dict)
    definitions: dict = field(default_factory=dict)

    def groups(self, side, facet):
        return getattr(self, side).get(facet, [])

    def terms(self, side, facet):
        return [term for group in self.groups(side, facet) for term in group]

    def properties(self, facet, side='guarantees'):
        """Defined PropertyAst terms of a facet, in order"""
        return [self.definitions[t] for t in self.terms(side, facet)
                if isinstance(self.definitions.get(t), PropertyAst)]

    def declarations(self, facet=Facet.DATA):
        found = []
        for side in ('assumptions', 'guarantees'):
            for term in self.terms(side, facet):
                item = self.definitions.get(term)
                if isinstance(item, Declaration) and item not in found:
                    found.append(item)
        return found

    def facets(self):
        present = set(self.assumptions) | set(self.guarantees)
        return [f for f in facets_by_priority() if f in present]

    def same_structure(self, other):
        """Facet-wise equality of both sides"""
        strip = lambda side: {f: g for f, g in side.items() if g}
        return (strip(self.assumptions) == strip(other.assumptions)
                and strip(self.guarantees) == strip(other.guarantees))


# ========== PARSING ==========

_COMMENT = re.compile(r'/\*.*?\*/', re.DOTALL)
_DEFINITION = re.compile(r'^\s*(?:assert\s+property\s+)?[\w.]+\s*=(?!=)')
_TERM = re.compile(r'^[A-Za-z_][\w.]*\*?$')


def _blocks(text, position, end):
    """Yield (keyword, argument, body, body_offset) for `kw [arg] { ... }` blocks"""

    header = re.compile(r'\s*(\w+)(?:\s+(\w+))?\s*\{')
    while position < end:
        if not text[position:end].strip():
            return
        match = header.match(text, position)
        if not match:
            snippet = text[position:end].strip().split('\n', 1)[0]
            raise ContractError(f"unexpected text '{snippet}'")
        depth = 1
        cursor = match.end()
        while depth and cursor < end:
            if text[cursor] == '{':
                depth += 1
            elif text[cursor] == '}':
                depth -= 1
            cursor += 1
        if depth:
            raise ContractError(f"unclosed block '{match.group(1)}'")
        yield match.group(1), match.group(2), match.end(), cursor - 1
        position = cursor


def _split_terms(statement):
    terms = []
    depth, start = 0, 0
    for i, char in enumerate(statement):
        if char == '(':
            depth += 1
        elif char == ')':
            depth -= 1
        elif char == '&' and depth == 0:
            if statement[i - 1:i] != '&' and statement[i + 1:i + 2] != '&':
                terms.append(statement[start:i])
                start = i + 1
    terms.append(statement[start:])
    return [' '.join(t.split()) for t in terms if t.strip()]


def _parse_group(body, contract):
    group = []
    for statement in body.split(';'):
        if not statement.strip():
            continue
        if _DEFINITION.match(statement):
            parsed = parse_property_file(statement + ';')
            for item in parsed.properties + parsed.declarations:
                if item.name in contract.definitions and contract.definitions[item.name] != item:
                    raise ContractError(f"duplicate property name '{item.name}'")
                contract.definitions[item.name] = item
                group.append(item.name)
            continue
        for term in _split_terms(statement):
            if not _TERM.match(term):
                parse_expression(term)
            elif re.match(r'^[pP]\d', term):
                term = 'P' + term[1:]
            group.append(term)
    return tuple(group)


def _parse_facets(text, start, end, side, contract):
    for keyword, argument, body_start, body_end in _blocks(text, start, end):
        if keyword != 'facet' or argument is None:
            raise ContractError(f"expected 'facet NAME {{', got '{keyword}'")
        facet = Facet.parse(argument)
        group = _parse_group(text[body_start:body_end], contract)
        if group:
            getattr(contract, side).setdefault(facet, []).append(group)


def _check_unique(contract):
    for side in ('assumptions', 'guarantees'):
        seen = {}
        for facet, groups in getattr(contract, side).items():
            for term in (t for g in groups for t in g):
                if seen.setdefault(term, facet) != facet:
                    raise ContractError(
                        f"'{term}' appears in both {seen[term].name} and {facet.name} {side}")


def parse_contract(text, name=None):
    """
    Contract text: optional `contract NAME`, an optional `assume { facet X { ... } }`
    block and `facet X { ... }` guarantee blocks. Inside a facet block each
    `;`-terminated statement is a property or declaration definition, or a
    '&'-joined list of term names
    """

    text = _COMMENT.sub(lambda m: ' ' * len(m.group()), text)
    header = re.match(r'\s*contract\s+([\w.]+)', text)
    contract = GeneralizedContract(name or (header.group(1) if header else 'contract'))
    position = header.end() if header else 0

    for keyword, argument, body_start, body_end in _blocks(text, position, len(text)):
        if keyword == 'assume':
            _parse_facets(text, body_start, body_end, 'assumptions', contract)
        elif keyword == 'facet' and argument:
            facet = Facet.parse(argument)
            group = _parse_group(text[body_start:body_end], contract)
            if group:
                contract.guarantees.setdefault(facet, []).append(group)
        else:
            raise ContractError(f"unexpected block '{keyword}'")
    _check_unique(contract)
    logger.debug("parsed contract %s with %d definitions", contract.name, len(contract.definitions))
    return contract


def format_contract(contract):
    """Contract text that parse_contract reads back to the same structure"""

    def render(groups, facet, indent):
        lines = []
        for group in groups:
            lines.append(f"{indent}facet {facet.name} {{")
            for term in group:
                item = contract.definitions.get(term)
                if isinstance(item, PropertyAst):
                    lines.append(f"{indent}    assert property {format_property(item)}")
                elif isinstance(item, Declaration):
                    lines.append(f"{indent}    {format_declaration(item)}")
                else:
                    lines.append(f"{indent}    {term};")
            lines.append(f"{indent}}}")
        return lines

    lines = [f"contract {contract.name}"]
    if any(contract.assumptions.values()):
        lines.append("assume {")
        for facet in facets_by_priority():
            lines.extend(render(contract.assumptions.get(facet, []), facet, '    '))
        lines.append("}")
    for facet in facets_by_priority():
        lines.extend(render(contract.guarantees.get(facet, []), facet, ''))
    return '\n'.join(lines) + '\n'


# ========== CONSISTENCY ==========

@dataclass
class ConsistencyReport:
    facet: Facet
    shared_variables: list
    findings: dict

    @property
    def ok(self):
        return 'conflict' not in self.findings.values()

    def to_dict(self):
        return {
            'facet': self.facet.name,
            'shared_variables': list(self.shared_variables),
            'findings': dict(self.findings),
            'ok': self.ok,
        }


def _facet_variables(contract, facet):
    names = []
    for term in contract.terms('guarantees', facet):
        item = contract.definitions.get(term)
        if isinstance(item, PropertyAst):
            names.extend(property_variables(item))
        elif term in PREDICATE_DEFINITIONS:
            names.extend(property_variables(parse_expression(PREDICATE_DEFINITIONS[term][1])))
    return list(dict.fromkeys(names))


def _constraints(contract, facet, variable):
    return [c for prop in contract.properties(facet)
            for c in positive_constraints(prop) if c.name == variable]


def _bool_values(constraints):
    values = set()
    for c in constraints:
        if c.op == '==':
            values.add(bool(c.value))
        elif c.op == '!=':
            values.add(not bool(c.value))
    return values


def satisfiable(constraints):
    """Whether an integer value meets every comparison"""

    low, high = float('-inf'), float('inf')
    excluded = set()
    for c in constraints:
        value = int(c.value)
        if c.op == '==':
            low, high = max(low, value), min(high, value)
        elif c.op == '<':
            high = min(high, value - 1)
        elif c.op == '<=':
            high = min(high, value)
        elif c.op == '>':
            low = max(low, value + 1)
        elif c.op == '>=':
            low = max(low, value)
        else:
            excluded.add(value)
    if low > high:
        return False
    if high - low + 1 > len(excluded):
        return True
    return any(v not in excluded for v in range(int(low), int(high) + 1))


def _finding(left, right):
    if not left or not right:
        return 'compatible-equal'
    if all(isinstance(c.value, bool) for c in left + right):
        values_left, values_right = _bool_values(left), _bool_values(right)
        if values_left == values_right:
            return 'compatible-equal'
        return 'compatible-implied' if values_left & values_right else 'conflict'
    if not all(satisfiable([a, b]) for a in left for b in right):
        return 'conflict'
    if {(c.op, c.value) for c in left} == {(c.op, c.value) for c in right}:
        return 'compatible-equal'
    return 'compatible-implied'


def consistency_report(c1, c2, facet, shared_vars=None):
    """Shared-variable check of one facet of two guarantee sides"""

    vars1 = _facet_variables(c1, facet)
    vars2 = set(_facet_variables(c2, facet))
    shared = [v for v in vars1 if v in vars2]
    if shared_vars is not None:
        shared = [v for v in shared if v in set(shared_vars)]
    findings = {v: _finding(_constraints(c1, facet, v), _constraints(c2, facet, v)) for v in shared}
    return ConsistencyReport(facet, shared, findings)


def compose(c1, c2, shared_vars=None):
    """
    Facet-wise conjunction of both sides, refused with CompositionConflict when
    a shared variable is bound inconsistently in some facet
    """

    reports = []
    for facet in facets_by_priority():
        if c1.terms('guarantees', facet) and c2.terms('guarantees', facet):
            reports.append(consistency_report(c1, c2, facet, shared_vars))
    if not all(r.ok for r in reports):
        raise CompositionConflict(reports)

    definitions = dict(c1.definitions)
    for key, item in c2.definitions.items():
        if key in definitions and definitions[key] != item:
            raise ContractError(f"duplicate property name '{key}' with different bodies")
        definitions[key] = item

    def merge(side):
        merged = {}
        for facet in facets_by_priority():
            groups = list(getattr(c1, side).get(facet, [])) + list(getattr(c2, side).get(facet, []))
            if groups:
                merged[facet] = groups
        return merged

    composed = GeneralizedContract(f"{c1.name}+{c2.name}", merge('assumptions'),
                                   merge('guarantees'), definitions)
    logger.info("composed %s", composed.name)
    return composed, reports


# ========== NORMALIZATION ==========

@dataclass
class NormalizedComponent:
    name: str
    automaton: object
    contract: GeneralizedContract
    facets: list


def normalize_component(automaton, contract, network=None, add_facets=(), ignore_facets=()):
    """
    Pair a component's behaviour with its contract; every defined property must
    resolve against the network (or the automaton's own declarations)
    """

    for facet in Facet:
        for side in ('assumptions', 'guarantees'):
            for prop in contract.properties(facet, side):
                if network is not None:
                    compile_property(prop, network)
                else:
                    _resolve_locally(prop, automaton)

    facets = contract.facets()
    for facet in map(Facet.parse, add_facets):
        if facet in facets:
            logger.warning("facet %s is already present in %s, nothing added", facet.name, contract.name)
        else:
            facets.append(facet)
    for facet in map(Facet.parse, ignore_facets):
        if facet in facets:
            facets.remove(facet)
        else:
            logger.warning("facet %s is absent from %s, nothing ignored", facet.name, contract.name)
    facets.sort(key=lambda f: f.priority)
    return NormalizedComponent(automaton.name, automaton, contract, facets)


def _resolve_locally(prop, automaton):
    declared = set(automaton.clocks) | {v.name for v in automaton.variables}
    for name in property_variables(prop):
        if name not in declared:
            raise UnresolvedAtomError(f"unresolved atom '{name}' in {prop.name} for {automaton.name}")


# ========== LAYERED VERIFICATION ==========

@dataclass
class LayerEntry:
    facet: Facet
    verdicts: list
    passed: bool = None
    waived: list = field(default_factory=list)

    @property
    def priority(self):
        return self.facet.priority

    @property
    def skipped(self):
        return self.passed is None

    def to_dict(self, network=None):
        return {
            'facet': self.facet.name,
            'priority': self.priority,
            'passed': self.passed,
            'waived': list(self.waived),
            'verdicts': [v.to_dict(network) for v in self.verdicts],
        }


@dataclass
class LayerReport:
    entries: list
    stopped_at: Facet = None

    @property
    def passed(self):
        return self.stopped_at is None

    def to_dict(self, network=None):
        return {
            'stopped_at': self.stopped_at.name if self.stopped_at else None,
            'layers': [entry.to_dict(network) for entry in self.entries],
        }


def _declaration_verdicts(network, contract):
    verdicts = []
    for decl in contract.declarations(Facet.DATA):
        missing = []
        for name in decl.names:
            if decl.kind == 'clock':
                ok = name in network.clock_index
            elif name in decl.arrays:
                ok = name in network.channels
            else:
                expected = 'bool' if decl.kind == 'boolean' else 'int'
                ok = network.var_types.get(name) == expected
            if not ok:
                missing.append(name)
        note = f"undeclared or mistyped: {', '.join(missing)}" if missing else ''
        verdicts.append(Verdict(decl.name, 'declaration', 'violated' if missing else 'holds',
                                states=len(network.clocks) + len(network.variables),
                                note=note, facet=Facet.DATA.name))
    return verdicts


def layered_verify(network, contract, graph, waivers=None):
    """
    Check guarantee facets in priority order, stopping at the first failing
    layer; verdicts of listed discrepancies are reported but do not stop a layer
    """

    waivers = config.KNOWN_DISCREPANCIES if waivers is None else waivers
    entries = []
    stopped_at = None
    for facet in facets_by_priority():
        if stopped_at is not None:
            entries.append(LayerEntry(facet, []))
            continue
        if facet is Facet.DATA:
            verdicts = _declaration_verdicts(network, contract)
        else:
            properties = [PropertyAst(p.name, p.quantifier, p.antecedent, p.consequent,
                                      p.facet or facet.name, p.line)
                          for p in contract.properties(facet)]
            verdicts = check_properties(properties, network, graph)
        failing = [v.property for v in verdicts if not v.passed]
        waived = [name for name in failing if name in waivers]
        entry = LayerEntry(facet, verdicts, passed=len(failing) == len(waived), waived=waived)
        entries.append(entry)
        if not entry.passed:
            stopped_at = facet
            logger.info("layer %s failed, later layers skipped", facet.name)
    return LayerReport(entries, stopped_at)
