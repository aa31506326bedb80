"""
Utilities Module
Helper functions for output, color and verdict tables
"""

import json
import os

import pandas as pd

import config


def print_header(text, width=60):
    """Simple header"""
    print("\n" + "="*width)
    print(text.center(width))
    print("="*width + "\n")


def use_color():
    """ANSI output unless LGS_COLOR=0 or stdout is not a terminal"""
    if os.environ.get('LGS_COLOR', '1') == '0':
        return False
    return hasattr(os.sys.stdout, 'isatty') and os.sys.stdout.isatty()


def colorize(result, text=None):
    text = result if text is None else text
    if not use_color() or result not in config.ANSI_COLORS:
        return text
    return f"{config.ANSI_COLORS[result]}{text}{config.ANSI_RESET}"


def format_ds(value):
    """Deciseconds as seconds, e.g. 55 -> '5.5 s'"""
    if value is None:
        return '-'
    return f"{value / config.TIME_SCALE:g} s"


def calculate_percentage(part, whole):
    """Calculate percentage"""
    if whole == 0:
        return 0
    return round((part / whole) * 100, 2)


def ensure_dir(path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def read_text(path):
    with open(path, encoding='utf-8') as handle:
        return handle.read()


def write_text(path, text):
    ensure_dir(path)
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(text)


def to_json(data):
    """Stable JSON text: sorted keys, two-space indent"""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_json(path, data):
    write_text(path, to_json(data))
    print(f"✓ Saved {path}")


def strip_timings(data):
    """Copy of a report without wall-clock fields"""
    if isinstance(data, dict):
        return {k: strip_timings(v) for k, v in data.items() if k != 'time_ms'}
    if isinstance(data, list):
        return [strip_timings(v) for v in data]
    return data


def verdicts_dataframe(records):
    """
    Verdict records (dicts) as a DataFrame with a discrepancy flag
    """

    columns = ['property', 'facet', 'kind', 'result', 'states', 'transitions', 'time_ms']
    df = pd.DataFrame(records, columns=columns)
    if df.empty:
        return df.assign(passed=pd.Series(dtype=bool), discrepancy=pd.Series(dtype=bool))
    df['facet'] = df['facet'].fillna('-')
    df['passed'] = df['result'].isin(config.PASSING_RESULTS)
    df['discrepancy'] = df['property'].isin(list(config.KNOWN_DISCREPANCIES))
    return df


def result_summary(df):
    """Counts per result with a share column"""

    summary = df.groupby('result').size().reset_index(name='count')
    summary['share'] = summary['count'].apply(lambda c: calculate_percentage(c, len(df)))
    return summary.sort_values('count', ascending=False).reset_index(drop=True)
