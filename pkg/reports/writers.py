"""
Output files for a run directory.

    provenance.json   config, config digest, cache digest, corpus provenance
    results.json      one record per claim (or variant)
    report.json       flat metric key -> value map plus the tables
    report.csv        the tables, one block each
    report.txt        the tables as aligned columns
    report.xlsx       optional workbook (not byte-stable)

Every file except the workbook is written deterministically and names
provenance.json.
"""

import csv
import io
import logging
import os
from dataclasses import dataclass

from corpus.loader import dump_json

logger = logging.getLogger(__name__)

PROVENANCE_FILE = 'provenance.json'


@dataclass(frozen=True)
class ReportTable:
    name: str
    columns: tuple
    rows: tuple

    def as_dict(self):
        return {
            'name': self.name,
            'columns': list(self.columns),
            'rows': [list(row) for row in self.rows],
        }


def format_cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'yes' if value else 'no'
    if isinstance(value, float):
        return f'{value:.2f}'
    return str(value)


def write_provenance(out_dir, config, cache_digest='', corpus_provenance=None, notes=None):
    document = {
        'run_id': config.run_id,
        'config': config.hashed_fields(),
        'config_digest': config.digest,
        'cache_digest': cache_digest,
        'corpus': corpus_provenance or {},
        'notes': notes or {},
    }
    dump_json(document, os.path.join(out_dir, PROVENANCE_FILE))
    return document


def write_results(out_dir, run_id, method, records, extra=None):
    document = {
        'provenance': PROVENANCE_FILE,
        'run_id': run_id,
        'method': method,
        'records': records,
    }
    document.update(extra or {})
    path = os.path.join(out_dir, 'results.json')
    dump_json(document, path)
    return path


def _csv_text(tables):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['provenance', PROVENANCE_FILE])
    for table in tables:
        writer.writerow([])
        writer.writerow([table.name])
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_cell(value) for value in row])
    return buffer.getvalue()


def render_text(tables):
    lines = [f'provenance: {PROVENANCE_FILE}']
    for table in tables:
        cells = [list(table.columns)] + [[format_cell(value) for value in row] for row in table.rows]
        widths = [max(len(row[index]) for row in cells) for index in range(len(table.columns))]
        lines.append('')
        lines.append(table.name)
        for row_index, row in enumerate(cells):
            lines.append('  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
            if row_index == 0:
                lines.append('  '.join('-' * width for width in widths))
    return '\n'.join(lines) + '\n'


def write_report(out_dir, metrics, tables):
    """report.json / .csv / .txt; returns the paths written."""
    document = {'provenance': PROVENANCE_FILE}
    document.update(metrics)
    document['tables'] = [table.as_dict() for table in tables]

    paths = [os.path.join(out_dir, name) for name in ('report.json', 'report.csv', 'report.txt')]
    dump_json(document, paths[0])
    with open(paths[1], 'w', encoding='utf-8', newline='') as f:
        f.write(_csv_text(tables))
    with open(paths[2], 'w', encoding='utf-8', newline='\n') as f:
        f.write(render_text(tables))
    return paths


def export_xlsx(out_dir, tables):
    """One sheet per table, header styled like the material exports."""
    from openpyxl import Workbook
    from openpyxl.styles import Alignment, Font, PatternFill

    wb = Workbook()
    wb.remove(wb.active)

    header_fill = PatternFill(start_color="366092", end_color="366092", fill_type="solid")
    header_font = Font(color="FFFFFF", bold=True)

    for table in tables:
        ws = wb.create_sheet(title=table.name[:31])
        for col, header in enumerate(table.columns, 1):
            cell = ws.cell(row=1, column=col, value=header)
            cell.fill = header_fill
            cell.font = header_font
            cell.alignment = Alignment(horizontal='center')
        for row, values in enumerate(table.rows, 2):
            for col, value in enumerate(values, 1):
                ws.cell(row=row, column=col, value=value)
        for col, header in enumerate(table.columns, 1):
            ws.column_dimensions[ws.cell(row=1, column=col).column_letter].width = max(12, len(header) + 4)

    path = os.path.join(out_dir, 'report.xlsx')
    wb.save(path)
    logger.info('Wrote workbook %s', path)
    return path
