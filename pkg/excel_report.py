"""
Excel Report Generator
Verification status workbooks
"""

import os

from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils.dataframe import dataframe_to_rows

import config
from utils import result_summary, verdicts_dataframe


class ExcelReporter:
    """Generate Excel reports"""

    def __init__(self, output_dir=config.EXCEL_DIR):
        self.output_dir = output_dir

    def _header(self, ws, row):
        for cell in ws[row]:
            cell.font = Font(bold=True, color=config.EXCEL_HEADER_FONT_COLOR)
            cell.fill = PatternFill(start_color=config.EXCEL_HEADER_COLOR, fill_type='solid')
            cell.alignment = Alignment(horizontal='center')

    def create_verdict_report(self, report, filename='verification_status.xlsx'):
        """Verdict sheet, result summary sheet and (when present) a layer sheet"""

        print("Creating Verification Status Report...")

        df = verdicts_dataframe(report.get('verdicts', []))

        wb = Workbook()
        ws = wb.active
        ws.title = "Verdicts"

        ws['A1'] = f"Property Verification Status - {report.get('network', '-')}"
        ws['A1'].font = Font(size=14, bold=True)
        ws.merge_cells('A1:I1')
        ws.append([])

        for r in dataframe_to_rows(df, index=False, header=True):
            ws.append(r)
        self._header(ws, 3)

        # Color result cells
        result_column = list(df.columns).index('result') + 1 if not df.empty else None
        if result_column:
            for row in range(4, len(df) + 4):
                cell = ws.cell(row=row, column=result_column)
                color = config.RESULT_COLORS.get(cell.value, '#ffffff').lstrip('#')
                cell.fill = PatternFill(start_color=color, fill_type='solid')

        ws.column_dimensions['A'].width = 12
        ws.column_dimensions['B'].width = 16
        ws.column_dimensions['C'].width = 12
        ws.column_dimensions['D'].width = 16

        summary = wb.create_sheet("Summary")
        if not df.empty:
            for r in dataframe_to_rows(result_summary(df), index=False, header=True):
                summary.append(r)
            self._header(summary, 1)

        layers = report.get('layers')
        if layers:
            sheet = wb.create_sheet("Layers")
            sheet.append(['facet', 'priority', 'passed', 'properties', 'waived'])
            for layer in layers['layers']:
                passed = 'skipped' if layer['passed'] is None else layer['passed']
                sheet.append([layer['facet'], layer['priority'], str(passed),
                              len(layer['verdicts']), ', '.join(layer['waived'])])
            sheet.append([])
            sheet.append(['stopped at', layers['stopped_at'] or 'none'])
            self._header(sheet, 1)

        tripped = report.get('tripped_monitors', [])
        if tripped:
            sheet = wb.create_sheet("Monitors")
            sheet.append(['monitor', 'target', 'clock', 'threshold', 'reading', 'discrepancy'])
            for m in tripped:
                sheet.append([m['monitor'], m['target'], m['clock'], m['threshold'],
                              m['reading'], m['discrepancy']])
            self._header(sheet, 1)

        os.makedirs(self.output_dir, exist_ok=True)
        filepath = f"{self.output_dir}/{filename}"
        wb.save(filepath)
        print(f"✓ Saved: {filepath}")

        return filepath
