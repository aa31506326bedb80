"""
Landing Gear System Models
Door, gear, actuator and pilot interface automata with the component timing table
"""

import logging
import re
from dataclasses import dataclass, fields
from enum import Enum

import config
from ta_core import (
    Edge, Guard, LgsError, Location, Network, RECEIVE, SEND, Sync,
    TimedAutomaton, VariableDecl, Constraint,
)

logger = logging.getLogger(__name__)


class FaultSpecError(LgsError):
    """Rejected fault injection"""


class TimingError(LgsError):
    """Invalid timing table"""


# ========== TIMING ==========

@dataclass(frozen=True)
class TimingTable:
    """Phase durations in deciseconds"""
    door_unlock_high: int = config.DOOR_UNLOCK_HIGH
    door_high_to_down: int = config.DOOR_HIGH_TO_DOWN
    door_down_to_high: int = config.DOOR_DOWN_TO_HIGH
    door_lock_high: int = config.DOOR_LOCK_HIGH
    gear_unlock_high: int = config.GEAR_UNLOCK_HIGH
    gear_high_to_down: int = config.GEAR_HIGH_TO_DOWN
    gear_lock_down: int = config.GEAR_LOCK_DOWN
    gear_unlock_down: int = config.GEAR_UNLOCK_DOWN
    gear_down_to_high: int = config.GEAR_DOWN_TO_HIGH
    gear_lock_high: int = config.GEAR_LOCK_HIGH

    @classmethod
    def from_seconds(cls, **seconds):
        """Build from seconds, scaled to integer deciseconds"""
        return cls(**{k: round(v * config.TIME_SCALE) for k, v in seconds.items()})

    def validate(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise TimingError(f"{f.name} must be positive, got {getattr(self, f.name)}")
        return self

    # cumulative ck_door readings
    @property
    def door_unlocked(self):
        return self.door_unlock_high

    @property
    def door_opened(self):
        return self.door_unlock_high + self.door_high_to_down

    @property
    def extension_locked_down(self):
        return self.door_opened + self.gear_unlock_high + self.gear_high_to_down + self.gear_lock_down

    @property
    def extension_closed(self):
        return self.extension_locked_down + self.door_down_to_high

    @property
    def extension_total(self):
        return self.extension_closed + self.door_lock_high

    @property
    def retraction_locked_high(self):
        return self.door_opened + self.gear_unlock_down + self.gear_down_to_high + self.gear_lock_high

    @property
    def retraction_closed(self):
        return self.retraction_locked_high + self.door_down_to_high

    @property
    def retraction_total(self):
        return self.retraction_closed + self.door_lock_high


NOMINAL_TIMING = TimingTable()


# ========== PHASES ==========

class DoorPhase(Enum):
    LockedClosed = 'LockedClosed'
    UnlockingHigh = 'UnlockingHigh'
    MovingHighDown = 'MovingHighDown'
    Open = 'Open'
    MovingDownHigh = 'MovingDownHigh'
    LockingHigh = 'LockingHigh'
    Failed = 'Failed'


class GearPhase(Enum):
    LockedHigh = 'LockedHigh'
    UnlockingHigh = 'UnlockingHigh'
    MovingHighDown = 'MovingHighDown'
    ExtendedUnlocked = 'ExtendedUnlocked'
    LockedDown = 'LockedDown'
    UnlockingDown = 'UnlockingDown'
    MovingDownHigh = 'MovingDownHigh'
    RetractedUnlocked = 'RetractedUnlocked'
    Failed = 'Failed'


class LightState(Enum):
    None_ = 'none'
    Green = 'green'
    Orange = 'orange'
    Red = 'red'


DOOR_LOCATIONS = {
    'locked_closed': DoorPhase.LockedClosed,
    'unlocking_high': DoorPhase.UnlockingHigh,
    'unlocked': DoorPhase.UnlockingHigh,
    'man_highdown': DoorPhase.MovingHighDown,
    'open': DoorPhase.Open,
    'man_downhigh_ext': DoorPhase.MovingDownHigh,
    'locking_high_ext': DoorPhase.LockingHigh,
    'man_downhigh_ret': DoorPhase.MovingDownHigh,
    'locking_high_ret': DoorPhase.LockingHigh,
    'relocked_ret': DoorPhase.LockedClosed,
}

GEAR_LOCATIONS = {
    'locked_high': GearPhase.LockedHigh,
    'unlocking_high': GearPhase.UnlockingHigh,
    'man_highdown': GearPhase.MovingHighDown,
    'extended': GearPhase.ExtendedUnlocked,
    'locked_down': GearPhase.LockedDown,
    'unlocking_down': GearPhase.UnlockingDown,
    'man_downhigh': GearPhase.MovingDownHigh,
    'retracted': GearPhase.RetractedUnlocked,
}

STALLABLE_PHASES = {
    'door': (DoorPhase.UnlockingHigh, DoorPhase.MovingHighDown,
             DoorPhase.MovingDownHigh, DoorPhase.LockingHigh),
    'gear': (GearPhase.UnlockingHigh, GearPhase.MovingHighDown, GearPhase.ExtendedUnlocked,
             GearPhase.UnlockingDown, GearPhase.MovingDownHigh, GearPhase.RetractedUnlocked),
}

PHASE_TYPES = {'door': DoorPhase, 'gear': GearPhase}
LOCATION_TABLES = {'door': DOOR_LOCATIONS, 'gear': GEAR_LOCATIONS}
COMPONENT_CLOCKS = {'door': 'ck_door', 'gear': 'ck_gear'}

# P39 channel variables, plus the light channels that drive the interface
CONTROL_CHANNELS = ('gear_extend', 'gear_retract', 'extend_gear_now', 'retract_gear_now',
                  'lock_highgear', 'unlock_gear', 'failure', 'full_extended',
                  'full_retracted', 'lock_downgear')
LIGHT_CHANNELS = ('light_none', 'light_green', 'light_orange')


def _set(**values):
    return tuple(values.items())


def _guard(*constraints):
    return Guard(tuple(Constraint(name, op, value) for name, op, value in constraints))


def _bools(*names_and_values):
    return tuple(VariableDecl(name, 'bool', value) for name, value in names_and_values)


# ========== BUILDERS ==========

def build_door(t=NOMINAL_TIMING):
    """
    Door with its high latching, driven by ck_door (reset at each actuator push)
    Each timed phase is bounded by its cumulative milestone
    """

    t.validate()
    ck = 'ck_door'
    locations = (
        Location('locked_closed'),
        Location('unlocking_high', _guard((ck, '<=', t.door_unlocked))),
        Location('unlocked', urgent=True),
        Location('man_highdown', _guard((ck, '<=', t.door_opened))),
        Location('open'),
        Location('man_downhigh_ext', _guard((ck, '<=', t.extension_closed))),
        Location('locking_high_ext', _guard((ck, '<=', t.extension_total))),
        Location('man_downhigh_ret', _guard((ck, '<=', t.retraction_closed))),
        Location('locking_high_ret', _guard((ck, '<=', t.retraction_total))),
        Location('relocked_ret', urgent=True),
    )
    # landing stays true after extension until the retraction push; cruise
    # (landing and retraction both false) is only the gear-up idle state
    edges = (
        Edge('locked_closed', 'unlocking_high', sync=Sync(RECEIVE, 'extend_gear_now'),
             resets=(ck,), updates=_set(landing=True)),
        Edge('locked_closed', 'unlocking_high', sync=Sync(RECEIVE, 'retract_gear_now'),
             resets=(ck,), updates=_set(landing=False, retraction=True)),
        Edge('unlocking_high', 'unlocked', _guard((ck, '==', t.door_unlocked)),
             Sync(SEND, 'light_orange'), updates=_set(door_locked=False)),
        Edge('unlocked', 'man_highdown',
             updates=_set(door_closed=False, door_m_highdown=True)),
        Edge('man_highdown', 'open', _guard((ck, '==', t.door_opened), ('landing', '==', True)),
             Sync(SEND, 'gear_extend'), updates=_set(door_m_highdown=False, door_open=True)),
        Edge('man_highdown', 'open', _guard((ck, '==', t.door_opened), ('retraction', '==', True)),
             Sync(SEND, 'gear_retract'), updates=_set(door_m_highdown=False, door_open=True)),
        Edge('open', 'man_downhigh_ext', sync=Sync(RECEIVE, 'full_extended'),
             updates=_set(door_open=False, door_m_downhigh=True)),
        Edge('open', 'man_downhigh_ret', sync=Sync(RECEIVE, 'full_retracted'),
             updates=_set(door_open=False, door_m_downhigh=True)),
        Edge('man_downhigh_ext', 'locking_high_ext', _guard((ck, '==', t.extension_closed)),
             updates=_set(door_m_downhigh=False, door_closed=True)),
        Edge('locking_high_ext', 'locked_closed', _guard((ck, '==', t.extension_total)),
             Sync(SEND, 'light_green'), updates=_set(door_locked=True)),
        Edge('man_downhigh_ret', 'locking_high_ret', _guard((ck, '==', t.retraction_closed)),
             updates=_set(door_m_downhigh=False, door_closed=True)),
        Edge('locking_high_ret', 'relocked_ret', _guard((ck, '==', t.retraction_total)),
             Sync(SEND, 'light_none'), updates=_set(door_locked=True)),
        Edge('relocked_ret', 'locked_closed', updates=_set(retraction=False)),
    )
    return TimedAutomaton(
        name='door',
        locations=locations,
        initial='locked_closed',
        edges=edges,
        clocks=(ck,),
        variables=_bools(('door_locked', True), ('door_open', False), ('door_closed', True),
                         ('door_m_highdown', False), ('door_m_downhigh', False),
                         ('failure_door', False)),
    )


def build_gear(t=NOMINAL_TIMING):
    """Gear with high/down latching, driven by ck_gear (reset when the door opens)"""

    t.validate()
    ck = 'ck_gear'
    unlocked_high = t.gear_unlock_high
    extended = unlocked_high + t.gear_high_to_down
    locked_down = extended + t.gear_lock_down
    unlocked_down = t.gear_unlock_down
    retracted = unlocked_down + t.gear_down_to_high
    locked_high = retracted + t.gear_lock_high

    locations = (
        Location('locked_high'),
        Location('unlocking_high', _guard((ck, '<=', unlocked_high))),
        Location('man_highdown', _guard((ck, '<=', extended))),
        Location('extended', _guard((ck, '<=', locked_down))),
        Location('locked_down'),
        Location('unlocking_down', _guard((ck, '<=', unlocked_down))),
        Location('man_downhigh', _guard((ck, '<=', retracted))),
        Location('retracted', _guard((ck, '<=', locked_high))),
    )
    edges = (
        Edge('locked_high', 'unlocking_high', sync=Sync(RECEIVE, 'gear_extend'), resets=(ck,)),
        Edge('unlocking_high', 'man_highdown', _guard((ck, '==', unlocked_high)),
             updates=_set(gear_locked_high=False, gear_m_highdown=True, full_gear_retraction=False)),
        Edge('man_highdown', 'extended', _guard((ck, '==', extended)),
             updates=_set(gear_m_highdown=False, full_gear_extension=True)),
        Edge('extended', 'locked_down', _guard((ck, '==', locked_down)),
             Sync(SEND, 'full_extended'), updates=_set(gear_locked_down=True)),
        Edge('locked_down', 'unlocking_down', sync=Sync(RECEIVE, 'gear_retract'), resets=(ck,)),
        Edge('unlocking_down', 'man_downhigh', _guard((ck, '==', unlocked_down)),
             updates=_set(gear_locked_down=False, gear_m_downhigh=True, full_gear_extension=False)),
        Edge('man_downhigh', 'retracted', _guard((ck, '==', retracted)),
             updates=_set(gear_m_downhigh=False, full_gear_retraction=True)),
        Edge('retracted', 'locked_high', _guard((ck, '==', locked_high)),
             Sync(SEND, 'full_retracted'), updates=_set(gear_locked_high=True)),
    )
    return TimedAutomaton(
        name='gear',
        locations=locations,
        initial='locked_high',
        edges=edges,
        clocks=(ck,),
        variables=_bools(('full_gear_extension', False), ('full_gear_retraction', True),
                         ('gear_locked_high', True), ('gear_locked_down', False),
                         ('gear_m_highdown', False), ('gear_m_downhigh', False),
                         ('failure_gear', False)),
    )


def build_actuator(environment=False):
    """
    Up/down actuator; a push is only possible between sequences
    With environment=True it also moves speed and height within their range
    """

    edges = [
        Edge('up', 'down',
             _guard(('landing', '==', False), ('retraction', '==', False),
                    ('door_locked', '==', True), ('gear_locked_high', '==', True)),
             Sync(SEND, 'extend_gear_now'), updates=_set(actuator_position=True)),
        Edge('down', 'up',
             _guard(('landing', '==', True), ('door_locked', '==', True),
                    ('gear_locked_down', '==', True)),
             Sync(SEND, 'retract_gear_now'), updates=_set(actuator_position=False)),
    ]
    if environment:
        low, high = config.ENVIRONMENT_RANGE
        for position in ('up', 'down'):
            for var in ('speed', 'height'):
                for value in range(low, high + 1):
                    edges.append(Edge(position, position, _guard((var, '!=', value)),
                                      updates=((var, value),), label=f"env_{var}_{value}"))
    return TimedAutomaton(
        name='actuator',
        locations=(Location('up'), Location('down')),
        initial='up',
        edges=tuple(edges),
        variables=_bools(('landing', False), ('retraction', False), ('actuator_position', False)),
    )


LIGHT_TARGETS = (('light_none', 'none'), ('light_green', 'green'),
                 ('light_orange', 'orange'), ('failure', 'red'))


def build_interface():
    """Pilot lights; red absorbs every later light request"""

    edges = []
    for source in ('none', 'green', 'orange', 'red'):
        for channel, target in LIGHT_TARGETS:
            edges.append(Edge(source, 'red' if source == 'red' else target,
                              sync=Sync(RECEIVE, channel)))
    return TimedAutomaton(
        name='interface',
        locations=(Location('none'), Location('green'), Location('orange'), Location('red')),
        initial='none',
        edges=tuple(edges),
    )


# ========== FAULTS AND MONITORS ==========

@dataclass(frozen=True)
class FaultSpec:
    """Component stalls in a phase once its clock reaches stall_from"""
    target: str
    stall_phase: str
    stall_from: int

    @classmethod
    def parse(cls, text):
        """Parse 'door:MovingHighDown@10'"""
        match = re.match(r'^\s*(\w+)\s*:\s*(\w+)\s*@\s*(\d+)\s*$', text)
        if not match:
            raise FaultSpecError(f"bad fault '{text}', expected <target>:<phase>@<ds>")
        target, phase, stall_from = match.groups()
        return cls(target, phase, int(stall_from))

    def __str__(self):
        return f"{self.target}:{self.stall_phase}@{self.stall_from}"


@dataclass(frozen=True)
class MonitorSpec:
    name: str
    target: str
    mode: str
    threshold: int
    locations: tuple

    @property
    def clock(self):
        return COMPONENT_CLOCKS[self.target]

    @property
    def failure_variable(self):
        return f"failure_{self.target}"


def monitor_specs(p28_scope=config.DEFAULT_P28_SCOPE):
    """Failure monitors attached to the phases each failure property watches"""

    if p28_scope not in config.P28_SCOPES:
        raise FaultSpecError(f"unknown P28 scope '{p28_scope}', expected one of {config.P28_SCOPES}")
    door = config.DOOR_MONITOR_THRESHOLDS
    gear = config.GEAR_MONITOR_THRESHOLDS
    specs = [
        MonitorSpec('P26', 'door', 'landing', door['P26'], ('unlocking_high',)),
        MonitorSpec('P27', 'door', 'landing', door['P27'], ('man_highdown',)),
        MonitorSpec('P29', 'door', 'landing', door['P29'],
                    ('man_highdown', 'open', 'man_downhigh_ext', 'locking_high_ext')),
        MonitorSpec('P30', 'gear', 'landing', gear['P30'], ('unlocking_high',)),
        MonitorSpec('P31', 'gear', 'landing', gear['P31'], ('man_highdown',)),
        MonitorSpec('P32', 'gear', 'landing', gear['P32'], ('unlocking_high', 'man_highdown', 'extended')),
        MonitorSpec('P33', 'gear', 'retraction', gear['P33'], ('unlocking_down',)),
        MonitorSpec('P34', 'gear', 'retraction', gear['P34'], ('man_downhigh',)),
        MonitorSpec('P35', 'gear', 'retraction', gear['P35'], ('unlocking_down', 'man_downhigh', 'retracted')),
    ]
    if p28_scope == 'verbatim':
        specs.insert(2, MonitorSpec('P28', 'door', 'landing', door['P28'], ('man_downhigh_ext',)))
    elif p28_scope == 'retraction':
        specs.insert(2, MonitorSpec('P28', 'door', 'retraction', door['P28'], ('man_downhigh_ret',)))
    return specs


def install_monitors(automaton, specs):
    """Add guard-triggered failure assignments as labelled self-loops"""

    edges = list(automaton.edges)
    for spec in specs:
        if spec.target != automaton.name:
            continue
        for location in spec.locations:
            edges.append(Edge(
                location, location,
                _guard((spec.mode, '==', True), (spec.clock, '>', spec.threshold),
                       (spec.failure_variable, '==', False)),
                Sync(SEND, 'failure'),
                updates=((spec.failure_variable, True),),
                label=f"monitor_{spec.name}"))
    return TimedAutomaton(automaton.name, automaton.locations, automaton.initial, tuple(edges),
                          automaton.clocks, automaton.variables, automaton.channels)


def _phase_exit_milestone(automaton, locations, clock):
    milestones = [c.value for loc in automaton.locations if loc.id in locations
                  for c in loc.invariant.conjuncts if c.name == clock]
    return max(milestones) if milestones else None


def check_fault(fault, t=NOMINAL_TIMING):
    """Reject faults that name an unknown target, a non-stallable phase or an empty window"""

    if fault.target not in STALLABLE_PHASES:
        raise FaultSpecError(f"unknown fault target '{fault.target}', expected door or gear")
    phase_type = PHASE_TYPES[fault.target]
    try:
        phase = phase_type(fault.stall_phase)
    except ValueError:
        raise FaultSpecError(f"unknown {fault.target} phase '{fault.stall_phase}'") from None
    if phase not in STALLABLE_PHASES[fault.target]:
        raise FaultSpecError(f"{fault.target} phase {phase.value} is not a moving or locking phase")
    if fault.stall_from < 0:
        raise FaultSpecError("stall_from must be non-negative")

    automaton = build_door(t) if fault.target == 'door' else build_gear(t)
    locations = [loc for loc, p in LOCATION_TABLES[fault.target].items() if p == phase]
    milestone = _phase_exit_milestone(automaton, locations, COMPONENT_CLOCKS[fault.target])
    if milestone is not None and fault.stall_from > milestone:
        raise FaultSpecError(
            f"stall_from {fault.stall_from} is after the {phase.value} exit at {milestone} ds")
    return phase


def inject_fault(automaton, fault, phase):
    """Drop the phase deadline and disable its exit from stall_from onward"""

    clock = COMPONENT_CLOCKS[fault.target]
    stalled = {loc for loc, p in LOCATION_TABLES[fault.target].items() if p == phase}
    locations = tuple(Location(loc.id, Guard(), loc.urgent) if loc.id in stalled else loc
                      for loc in automaton.locations)
    edges = []
    for edge in automaton.edges:
        timed_exit = (edge.source in stalled and edge.source != edge.target
                      and any(c.name == clock and c.op == '==' for c in edge.guard.conjuncts))
        if timed_exit:
            edge = Edge(edge.source, edge.target,
                        edge.guard & _guard((clock, '<', fault.stall_from)),
                        edge.sync, edge.resets, edge.updates, edge.label)
        edges.append(edge)
    return TimedAutomaton(automaton.name, locations, automaton.initial, tuple(edges),
                          automaton.clocks, automaton.variables, automaton.channels)


def assemble_system(t=NOMINAL_TIMING, faults=(), p28_scope=config.DEFAULT_P28_SCOPE,
                    environment=True):
    """
    Compose door, gear, actuator and interface with the mode and environment
    variables and the failure monitors installed
    """

    checked = [(fault, check_fault(fault, t)) for fault in faults]
    door = build_door(t)
    gear = build_gear(t)
    for fault, phase in checked:
        if fault.target == 'door':
            door = inject_fault(door, fault, phase)
        else:
            gear = inject_fault(gear, fault, phase)
        logger.info("injected fault %s", fault)

    specs = monitor_specs(p28_scope)
    door = install_monitors(door, specs)
    gear = install_monitors(gear, specs)

    low, _ = config.ENVIRONMENT_RANGE
    shared_variables = (
        VariableDecl('speed', 'int', low),
        VariableDecl('height', 'int', low),
        VariableDecl('j', 'int', 0),
        VariableDecl('i', 'int', 0),
    )
    name = 'lgs' if not faults else 'lgs[' + ','.join(str(f) for f in faults) + ']'
    return Network(
        automata=(door, gear, build_actuator(environment), build_interface()),
        variables=shared_variables,
        channels=CONTROL_CHANNELS + LIGHT_CHANNELS,
        name=name,
    )


# ========== TIMELINES ==========

def milestone_timeline(mode, t=NOMINAL_TIMING):
    """Ordered (event, ck_door, ck_gear) readings of a nominal sequence"""

    opened = t.door_unlock_high + t.door_high_to_down
    if mode == 'extension':
        unlocked = t.gear_unlock_high
        moved = unlocked + t.gear_high_to_down
        locked = moved + t.gear_lock_down
        closed = opened + locked + t.door_down_to_high
        return [
            ('unlocked', t.door_unlock_high, None),
            ('open', opened, 0),
            ('gear_unlocked', opened + unlocked, unlocked),
            ('extended', opened + moved, moved),
            ('locked_down', opened + locked, locked),
            ('closed', closed, None),
            ('locked', closed + t.door_lock_high, None),
        ]
    if mode == 'retraction':
        unlocked = t.gear_unlock_down
        moved = unlocked + t.gear_down_to_high
        locked = moved + t.gear_lock_high
        closed = opened + locked + t.door_down_to_high
        return [
            ('unlocked', t.door_unlock_high, None),
            ('open', opened, 0),
            ('gear_unlocked', opened + unlocked, unlocked),
            ('retracted', opened + moved, moved),
            ('locked_high', opened + locked, locked),
            ('closed', closed, None),
            ('locked', closed + t.door_lock_high, None),
        ]
    raise ValueError(f"unknown mode '{mode}', expected extension or retraction")


def sequence_schedule(mode, t=NOMINAL_TIMING):
    """Simulator choices that drive one nominal sequence from its start state"""

    def delay(d):
        return [f"delay({d})"] if d > 0 else []

    steps = ['actuator.up->down' if mode == 'extension' else 'actuator.down->up']
    steps += delay(t.door_unlock_high)
    steps += ['door.unlocking_high->unlocked', 'door.unlocked->man_highdown']
    steps += delay(t.door_high_to_down)
    steps += ['door.man_highdown->open']
    if mode == 'extension':
        steps += delay(t.gear_unlock_high) + ['gear.unlocking_high->man_highdown']
        steps += delay(t.gear_high_to_down) + ['gear.man_highdown->extended']
        steps += delay(t.gear_lock_down) + ['gear.extended->locked_down']
        steps += delay(t.door_down_to_high) + ['door.man_downhigh_ext->locking_high_ext']
        steps += delay(t.door_lock_high) + ['door.locking_high_ext->locked_closed']
    elif mode == 'retraction':
        steps += delay(t.gear_unlock_down) + ['gear.unlocking_down->man_downhigh']
        steps += delay(t.gear_down_to_high) + ['gear.man_downhigh->retracted']
        steps += delay(t.gear_lock_high) + ['gear.retracted->locked_high']
        steps += delay(t.door_down_to_high) + ['door.man_downhigh_ret->locking_high_ret']
        steps += delay(t.door_lock_high) + ['door.locking_high_ret->relocked_ret',
                                            'door.relocked_ret->locked_closed']
    else:
        raise ValueError(f"unknown mode '{mode}', expected extension or retraction")
    return steps


def timeline_from_trace(trace, network, mode):
    """Observed (event, ck_door, ck_gear) readings along a trace, shaped like milestone_timeline"""

    events = []
    states = trace.states
    for before, after in zip(states, states[1:]):
        ck_door = network.value(after, 'ck_door')
        ck_gear = network.value(after, 'ck_gear')
        door_before = network.location_of(before, 'door')
        door_after = network.location_of(after, 'door')
        gear_before = network.location_of(before, 'gear')
        gear_after = network.location_of(after, 'gear')

        if door_after == 'unlocked' and door_before != 'unlocked':
            events.append(('unlocked', ck_door, None))
        if network.value(after, 'door_open') and not network.value(before, 'door_open'):
            events.append(('open', ck_door, ck_gear))
        if gear_before in ('unlocking_high', 'unlocking_down') and gear_after != gear_before:
            events.append(('gear_unlocked', ck_door, ck_gear))
        if gear_after != gear_before and gear_after in ('extended', 'retracted', 'locked_down', 'locked_high'):
            event = {'extended': 'extended', 'retracted': 'retracted',
                     'locked_down': 'locked_down', 'locked_high': 'locked_high'}[gear_after]
            events.append((event, ck_door, ck_gear))
        if network.value(after, 'door_closed') and not network.value(before, 'door_closed'):
            events.append(('closed', ck_door, None))
        if network.value(after, 'door_locked') and not network.value(before, 'door_locked'):
            events.append(('locked', ck_door, None))
    return events


# ========== STATE READINGS ==========

def door_phase(network, state):
    if network.value(state, 'failure_door'):
        return DoorPhase.Failed
    return DOOR_LOCATIONS[network.location_of(state, 'door')]


def gear_phase(network, state):
    if network.value(state, 'failure_gear'):
        return GearPhase.Failed
    return GEAR_LOCATIONS[network.location_of(state, 'gear')]


def light_of(network, state):
    return LightState(network.location_of(state, 'interface'))


def expected_light(network, state):
    """Light required by the cockpit rules for this state"""

    value = network.value
    if value(state, 'failure_door') or value(state, 'failure_gear'):
        return LightState.Red
    if value(state, 'gear_locked_down') and value(state, 'door_locked'):
        return LightState.Green
    if value(state, 'gear_locked_high') and value(state, 'door_locked'):
        return LightState.None_
    return LightState.Orange


def tripped_monitors(network, graph):
    """
    First (breadth-first) firing of every monitor in an explored graph,
    with the clock reading at which it fired
    """

    thresholds = {**config.DOOR_MONITOR_THRESHOLDS, **config.GEAR_MONITOR_THRESHOLDS}
    found = {}
    for source, _, label in graph.edges:
        match = re.search(r'\b(door|gear)\.monitor_(P\d+)', label)
        if not match or match.group(2) in found:
            continue
        target, name = match.groups()
        clock = COMPONENT_CLOCKS[target]
        state = graph.states[source]
        found[name] = {
            'monitor': name,
            'target': target,
            'clock': clock,
            'threshold': thresholds[name],
            'reading': network.value(state, clock),
            'discrepancy': name in config.KNOWN_DISCREPANCIES,
        }
    return [found[name] for name in sorted(found, key=lambda n: int(n[1:]))]
