"""
HTML Dashboard Generator
Single page verification status view
"""

import config
from utils import verdicts_dataframe, write_text


def _verdict_rows(df):
    rows = ''
    for _, v in df.iterrows():
        color = config.RESULT_COLORS.get(v['result'], '#ffffff')
        flag = ' *' if v['discrepancy'] else ''
        rows += f"""
            <tr>
                <td>{v['property']}{flag}</td>
                <td>{v['facet']}</td>
                <td>{v['kind']}</td>
                <td style="background: {color};">{v['result']}</td>
                <td>{int(v['states']):,}</td>
            </tr>"""
    return rows


def _layer_rows(layers):
    rows = ''
    for layer in (layers or {}).get('layers', []):
        if layer['passed'] is None:
            status = 'skipped'
        else:
            status = 'passed' if layer['passed'] else 'FAILED'
        rows += f"""
            <tr>
                <td>{layer['priority']}</td>
                <td>{layer['facet']}</td>
                <td>{status}</td>
                <td>{', '.join(layer['waived']) or '-'}</td>
            </tr>"""
    return rows


def create_html_dashboard(report, filename=config.DASHBOARD_FILE):
    """
    Generate HTML status page from a check report dict
    """

    print("Creating HTML Dashboard...")

    df = verdicts_dataframe(report.get('verdicts', []))
    total = len(df)
    passed = int(df['passed'].sum()) if total else 0
    failed = total - passed
    layers = report.get('layers')
    stopped = (layers or {}).get('stopped_at') or 'none'

    html_content = f"""
<!DOCTYPE html>
<html lang="en">
<head>
    <meta charset="UTF-8">
    <title>{config.DASHBOARD_TITLE}</title>
    <style>
        body {{
            font-family: 'Segoe UI', Tahoma, Geneva, Verdana, sans-serif;
            background: #f5f5f5;
            padding: 20px;
        }}

        .dashboard {{
            max-width: 1200px;
            margin: 0 auto;
            background: white;
            border-radius: 8px;
            box-shadow: 0 2px 10px rgba(0,0,0,0.1);
            padding: 30px;
        }}

        h1 {{
            color: #2c3e50;
            margin-bottom: 30px;
            font-size: 28px;
        }}

        .kpi-cards {{
            display: grid;
            grid-template-columns: repeat(auto-fit, minmax(200px, 1fr));
            gap: 20px;
            margin-bottom: 30px;
        }}

        .kpi-card {{
            background: #4472C4;
            color: white;
            padding: 20px;
            border-radius: 8px;
        }}

        .kpi-value {{
            font-size: 28px;
            font-weight: bold;
        }}

        table {{
            width: 100%;
            border-collapse: collapse;
            margin-bottom: 30px;
        }}

        th {{
            background: #4472C4;
            color: white;
            padding: 8px;
            text-align: left;
        }}

        td {{
            padding: 6px 8px;
            border-bottom: 1px solid #eee;
        }}
    </style>
</head>
<body>
    <div class="dashboard">
        <h1>{config.DASHBOARD_TITLE}</h1>
        <p>Network: {report.get('network', '-')} | Faults: {', '.join(report.get('faults', [])) or 'none'}
           | P28 scope: {report.get('p28_scope', config.DEFAULT_P28_SCOPE)}</p>

        <div class="kpi-cards">
            <div class="kpi-card"><div>Properties</div><div class="kpi-value">{total}</div></div>
            <div class="kpi-card"><div>Passed</div><div class="kpi-value">{passed}</div></div>
            <div class="kpi-card"><div>Failed</div><div class="kpi-value">{failed}</div></div>
            <div class="kpi-card"><div>States</div><div class="kpi-value">{report.get('states', 0):,}</div></div>
            <div class="kpi-card"><div>Stopped at</div><div class="kpi-value">{stopped}</div></div>
        </div>

        <h2>Layers</h2>
        <table>
            <tr><th>Priority</th><th>Facet</th><th>Status</th><th>Waived</th></tr>{_layer_rows(layers)}
        </table>

        <h2>Verdicts</h2>
        <table>
            <tr><th>Property</th><th>Facet</th><th>Kind</th><th>Result</th><th>States</th></tr>{_verdict_rows(df)}
        </table>
        <p>* known discrepancy: the property fails as written on the nominal model</p>
    </div>
</body>
</html>
"""

    write_text(filename, html_content)
    print(f"✓ Saved: {filename}")
    print("  → Open in browser to view dashboard")

    return filename
