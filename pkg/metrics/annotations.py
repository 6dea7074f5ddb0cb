"""
Readers for human-study annotation files.

Study files (agreement / faithful / preferred tests), JSON:

    {"groups": {"<group>": [{"claim_id", "labels": [...], "preferred"}]}}

or an Excel sheet with a header row and the columns

    group | claim_id | label_1 | label_2 | label_3 | preferred

Explanation annotation files, JSON:

    {"explanations": [{"rewrite_id", "points": [...], "decoys": [index, ...],
                       "annotations": {"<annotator>": [label per point]}}]}
"""

import json
import logging
import os

from corpus.exceptions import CorpusError

from .agreement import StudyItem
from .explanations import AnnotatedExplanation, parse_point_label

logger = logging.getLogger(__name__)


def _read_json(path):
    if not os.path.exists(path):
        raise CorpusError(f'File not found: {path}')
    with open(path, 'r', encoding='utf-8') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as exc:
            raise CorpusError(f'Invalid JSON in {path}: {exc}') from exc


def _parse_preferred(value):
    if value is None or value == '':
        return None
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ('1', 'true', 'yes', 'y')


def _study_from_json(path):
    document = _read_json(path)
    groups = document.get('groups')
    if not isinstance(groups, dict):
        raise CorpusError(f'{path}: expected a "groups" object')

    study = {}
    for name, records in groups.items():
        items = []
        for record in records:
            claim_id = record.get('claim_id')
            if not claim_id:
                raise CorpusError(f'{path}: study record without claim_id in group "{name}"')
            items.append(StudyItem(
                claim_id=claim_id,
                labels=tuple(str(label).strip().lower() for label in record.get('labels', [])),
                preferred=_parse_preferred(record.get('preferred')),
            ))
        study[name] = items
    return study


def _study_from_excel(path):
    import openpyxl

    workbook = openpyxl.load_workbook(path, read_only=True)
    sheet = workbook.active
    study = {}
    for row_num, row in enumerate(sheet.iter_rows(min_row=2, values_only=True), 2):
        if not row or not row[0] or not row[1]:
            continue
        group = str(row[0]).strip()
        labels = tuple(str(cell).strip().lower() for cell in row[2:5] if cell not in (None, ''))
        preferred = _parse_preferred(row[5]) if len(row) > 5 else None
        study.setdefault(group, []).append(
            StudyItem(claim_id=str(row[1]).strip(), labels=labels, preferred=preferred)
        )
    workbook.close()
    logger.info('Read %d study groups from %s', len(study), path)
    return study


def load_study(path):
    """group name -> list of StudyItem."""
    if not os.path.exists(path):
        raise CorpusError(f'File not found: {path}')
    extension = os.path.splitext(path)[1].lower()
    if extension == '.xlsx':
        return _study_from_excel(path)
    return _study_from_json(path)


def study_group(spec):
    """
    Resolve a `FILE[:GROUP]` argument to its items.

    Without a group name the file must hold exactly one group.
    """
    path, group = spec, ''
    if ':' in spec and not os.path.exists(spec):
        path, group = spec.rsplit(':', 1)
    study = load_study(path)
    if not group:
        if len(study) != 1:
            raise CorpusError(f'{path} holds groups {", ".join(sorted(study))}; pick one with FILE:GROUP')
        group = next(iter(study))
    if group not in study:
        raise CorpusError(f'No group "{group}" in {path}')
    return group, study[group]


def load_explanation_annotations(path):
    document = _read_json(path)
    explanations = []
    for record in document.get('explanations', []):
        rewrite_id = record.get('rewrite_id')
        if not rewrite_id:
            raise CorpusError(f'{path}: explanation record without rewrite_id')
        points = tuple(record.get('points', []))
        annotations = {
            str(annotator): tuple(parse_point_label(label) for label in labels)
            for annotator, labels in record.get('annotations', {}).items()
        }
        explanations.append(AnnotatedExplanation(
            rewrite_id=rewrite_id,
            points=points,
            annotations=annotations,
            decoys=tuple(record.get('decoys', [])),
        ))
    if not explanations:
        raise CorpusError(f'No explanations in {path}')
    return explanations
