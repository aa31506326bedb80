"""
Configuration Module
Project settings and constants
"""

import os

# File paths
PROJECT_DIR = os.path.dirname(os.path.abspath(__file__))
OUTPUT_DIR = 'output'
EXCEL_DIR = 'excel'
PROPERTIES_DIR = 'properties'
CONTRACTS_DIR = 'contracts'
MODELS_DIR = 'models'

# File names
DEFAULT_PROPERTIES_FILE = 'lgs.psl'
DEFAULT_REPORT_FILE = 'check_report.json'
DASHBOARD_FILE = 'dashboard.html'

# Bundled data files
DEFAULT_PROPERTIES_PATH = os.path.join(PROJECT_DIR, PROPERTIES_DIR, DEFAULT_PROPERTIES_FILE)
DEFAULT_CONTRACT_PATH = os.path.join(PROJECT_DIR, CONTRACTS_DIR, 'lgs.gc')
SCHEDULES_DIR = os.path.join(PROJECT_DIR, MODELS_DIR, 'schedules')

# Time unit: one clock tick is a decisecond (timing table seconds x 10)
TIME_SCALE = 10

# Component timing table, deciseconds
DOOR_UNLOCK_HIGH = 4
DOOR_HIGH_TO_DOWN = 12
DOOR_DOWN_TO_HIGH = 12
DOOR_LOCK_HIGH = 3
GEAR_UNLOCK_HIGH = 8
GEAR_HIGH_TO_DOWN = 12
GEAR_LOCK_DOWN = 4
GEAR_UNLOCK_DOWN = 8
GEAR_DOWN_TO_HIGH = 16
GEAR_LOCK_HIGH = 4

EXTENSION_TOTAL = 55
RETRACTION_TOTAL = 59

# Environment integers (speed, height)
ENVIRONMENT_RANGE = (1, 4)

# Failure monitor thresholds (ds), taken verbatim from the failure properties
DOOR_MONITOR_THRESHOLDS = {'P26': 4, 'P27': 16, 'P28': 44, 'P29': 59}
GEAR_MONITOR_THRESHOLDS = {'P30': 8, 'P31': 20, 'P32': 24,
                           'P33': 8, 'P34': 24, 'P35': 28}
P28_SCOPES = ('verbatim', 'retraction', 'off')
DEFAULT_P28_SCOPE = 'verbatim'

# Properties that fail as written on the nominal model
KNOWN_DISCREPANCIES = {
    'P13': 'gear_locked_down==true is set on leaving gear.extended at ck_gear==24, so no single state has both',
    'P15': 'door_closed==true and door_open==true never hold together (P21); the antecedent is the state before the door opens',
    'P16': 'ck_gear==20 for retraction completion; the timing table gives 24 to retract and 28 to lock high',
    'P28': 'ck_door>44 overlaps the nominal extension closing window (40-52)',
    'P26': 'door_locked && door_closed also holds once the door relocks after extension (ck_door>=55)',
    'P33': 'gear_locked_down==false && door_open holds for the whole retraction move (ck_gear 8-28)',
    'P35': 'ck_gear keeps its extension reading until the door opens for retraction',
}

# Facet priorities (1 = highest)
FACET_PRIORITIES = {
    'DATA': 1,
    'SAFETY': 2,
    'FUNCTIONALITY': 3,
    'ATTAINABILITY': 4,
    'LIVENESS': 5,
}

# Exploration
DEFAULT_STATE_BOUND = 5_000_000
DEFAULT_SEED = 7
DEFAULT_SIMULATION_STEPS = 200
DEFAULT_WORKERS = 1

# Verdict results
PASSING_RESULTS = ('holds', 'witness-found', 'vacuous')
UNIVERSAL_KINDS = ('invariant', 'leads-to')

# Exit codes
EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_INPUT_ERROR = 2

# Chart Settings
CHART_STYLE = 'seaborn-v0_8-whitegrid'
CHART_DPI = 300
CHART_FIGURE_SIZE = (12, 6)

# Excel Settings
EXCEL_HEADER_COLOR = '4472C4'
EXCEL_HEADER_FONT_COLOR = 'FFFFFF'

# Dashboard Settings
DASHBOARD_TITLE = 'Landing Gear System Verification Status'

# Report Settings
REPORT_WIDTH = 70

# Color Schemes
RESULT_COLORS = {
    'holds': '#2ecc71',
    'witness-found': '#27ae60',
    'vacuous': '#f1c40f',
    'violated': '#e74c3c',
    'witness-absent': '#e67e22',
    'inconclusive': '#95a5a6',
}

ANSI_COLORS = {
    'holds': '\033[32m',
    'witness-found': '\033[32m',
    'vacuous': '\033[33m',
    'violated': '\033[31m',
    'witness-absent': '\033[31m',
    'inconclusive': '\033[90m',
}
ANSI_RESET = '\033[0m'


def get_config():
    """Return all configuration as dictionary"""

    return {
        'paths': {
            'output': OUTPUT_DIR,
            'excel': EXCEL_DIR,
            'properties': PROPERTIES_DIR,
            'contracts': CONTRACTS_DIR,
            'models': MODELS_DIR
        },
        'timing': {
            'door_unlock_high': DOOR_UNLOCK_HIGH,
            'door_high_to_down': DOOR_HIGH_TO_DOWN,
            'door_down_to_high': DOOR_DOWN_TO_HIGH,
            'door_lock_high': DOOR_LOCK_HIGH,
            'gear_unlock_high': GEAR_UNLOCK_HIGH,
            'gear_high_to_down': GEAR_HIGH_TO_DOWN,
            'gear_lock_down': GEAR_LOCK_DOWN,
            'gear_unlock_down': GEAR_UNLOCK_DOWN,
            'gear_down_to_high': GEAR_DOWN_TO_HIGH,
            'gear_lock_high': GEAR_LOCK_HIGH
        },
        'verification': {
            'state_bound': DEFAULT_STATE_BOUND,
            'seed': DEFAULT_SEED,
            'workers': DEFAULT_WORKERS,
            'p28_scope': DEFAULT_P28_SCOPE,
            'facet_priorities': dict(FACET_PRIORITIES)
        }
    }
