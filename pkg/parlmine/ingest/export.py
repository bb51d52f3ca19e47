import logging
import warnings
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..exceptions import ExportStructureWarning, MalformedXml, WrongRootElement

logger = logging.getLogger(__name__)

ROOT_TAG = 'Export'
PROCESS_TAG = 'Vorgang'
SIDE_ENTRY_TAG = 'Nebeneintrag'
DOCUMENT_TAG = 'Dokument'

# Accepted spellings per field, first one is the canonical key used downstream.
PROCESS_FIELDS = {
    'internal_id': ('VNr', 'VorgangId', 'Id', 'ID', 'id'),
    'v_typ': ('VTyp',),
    'v_typ_l': ('VTypL',),
    'v_sys': ('VSys',),
    'v_sys_l': ('VSysL',),
}

DOCUMENT_FIELDS = {
    'internal_id': ('DokNr', 'DokumentId', 'Id', 'ID', 'id'),
    'title': ('Titel', 'Title'),
    'date_text': ('DokDat', 'Datum'),
    'dok_typ_l': ('DokTypL',),
    'dok_art_l': ('DokArtL',),
    'url': ('LokURL', 'URL', 'Url'),
    'abstract': ('Abstrakt', 'Abstract'),
}

DOCUMENT_LIST_FIELDS = {
    'descriptors': ('Desk', 'Deskriptor'),
    'authors': ('Urheber', 'Autor'),
    'speakers': ('Redner', 'Sprecher'),
}

LIST_SEPARATOR = ';'


@dataclass(frozen=True)
class RawDocument:
    """One ``Dokument`` element, fields as found in the file."""

    internal_id: Optional[str] = None
    title: Optional[str] = None
    date_text: Optional[str] = None
    dok_typ_l: Optional[str] = None
    dok_art_l: Optional[str] = None
    url: Optional[str] = None
    descriptors: Tuple[str, ...] = ()
    authors: Tuple[str, ...] = ()
    speakers: Tuple[str, ...] = ()
    abstract: Optional[str] = None
    extra_attributes: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class RawProcess:
    """One ``Vorgang`` element with its side entries and documents."""

    internal_id: Optional[str] = None
    v_typ: Optional[str] = None
    v_typ_l: Optional[str] = None
    v_sys: Optional[str] = None
    v_sys_l: Optional[str] = None
    side_entries: Tuple[str, ...] = ()
    documents: Tuple[RawDocument, ...] = ()


@dataclass(frozen=True)
class RawExport:
    source_name: str
    processes: Tuple[RawProcess, ...] = ()


@dataclass(frozen=True)
class IngestWarning:
    """A data quality finding of :func:`scan_export`.

    ``document_index`` is ``None`` for process-level findings.
    """

    category: str
    process_index: int
    document_index: Optional[int]
    message: str


MISSING_DATE = 'missing-date'
MISSING_ACTIVITY = 'missing-activity'
EMPTY_PROCESS = 'empty-process'


def _local_name(tag):
    return tag.rsplit('}', 1)[-1] if isinstance(tag, str) else tag


def _clean_text(text):
    if text is None:
        return None
    text = text.strip()
    return text or None


def _element_text(element):
    """Text of an element and all its descendants, attribute values included."""
    parts = [_clean_text(t) for t in element.itertext()]
    parts.extend(_clean_text(v) for e in element.iter() for v in e.attrib.values())
    return ' '.join(p for p in parts if p) or None


def _split_list(text):
    return tuple(item.strip() for item in text.split(LIST_SEPARATOR) if item.strip())


def _alias_index(fields):
    index = {}
    for name, aliases in fields.items():
        for alias in aliases:
            index[alias] = name
    return index


_PROCESS_ALIASES = _alias_index(PROCESS_FIELDS)
_DOCUMENT_ALIASES = _alias_index(DOCUMENT_FIELDS)
_DOCUMENT_LIST_ALIASES = _alias_index(DOCUMENT_LIST_FIELDS)


def _parse_document(element):
    values = {}
    lists = {name: [] for name in DOCUMENT_LIST_FIELDS}
    extra = {}

    def put(key, text):
        name = _DOCUMENT_ALIASES.get(key)
        if name is not None and name not in values:
            values[name] = text
        elif name is not None and values[name] == text:
            pass
        elif name is not None:
            # a second, different value for a named field
            extra[f'{key}_{len(extra) + 2}'] = text
        elif key in extra:
            extra[key] = f'{extra[key]}{LIST_SEPARATOR} {text}'
        else:
            extra[key] = text

    # attribute form; list values are ';'-separated
    for key, raw_value in element.attrib.items():
        key, text = _local_name(key), _clean_text(raw_value)
        if text is None:
            continue
        if key in _DOCUMENT_LIST_ALIASES:
            lists[_DOCUMENT_LIST_ALIASES[key]].extend(_split_list(text))
        else:
            put(key, text)

    # child-element form; list values repeat the element or nest one item per child
    for child in element:
        key = _local_name(child.tag)
        if key in _DOCUMENT_LIST_ALIASES and len(child):
            items = [_element_text(item) for item in child]
            lists[_DOCUMENT_LIST_ALIASES[key]].extend(i for i in items if i)
            continue
        text = _element_text(child)
        if text is None:
            continue
        if key in _DOCUMENT_LIST_ALIASES:
            lists[_DOCUMENT_LIST_ALIASES[key]].append(text)
        else:
            put(key, text)

    return RawDocument(
        **values,
        **{name: tuple(items) for name, items in lists.items()},
        extra_attributes=extra,
    )


def _parse_process(element, skipped):
    values = {}
    side_entries = []
    documents = []

    for key, raw_value in element.attrib.items():
        key, text = _local_name(key), _clean_text(raw_value)
        if key in _PROCESS_ALIASES and text is not None:
            values.setdefault(_PROCESS_ALIASES[key], text)
        elif text is not None:
            skipped[f'{PROCESS_TAG}/@{key}'] += 1

    for child in element:
        tag = _local_name(child.tag)
        if tag == DOCUMENT_TAG:
            documents.append(_parse_document(child))
        elif tag == SIDE_ENTRY_TAG:
            side_entries.append(_element_text(child) or '')
        elif tag in _PROCESS_ALIASES and _clean_text(child.text) is not None:
            values.setdefault(_PROCESS_ALIASES[tag], _clean_text(child.text))
        else:
            skipped[f'{PROCESS_TAG}/{tag}'] += 1

    return RawProcess(**values, side_entries=tuple(side_entries), documents=tuple(documents))


def parse_export(xml_source, source_name):
    """Parse a parliamentary documentation export into a :class:`RawExport`.

    The encoding declared in the XML prolog is honored, UTF-8 otherwise.
    Document properties are accepted both as XML attributes and as child
    elements; a property element with nested elements contributes their
    text (one list item per child for list fields). Unknown properties of a
    document are kept in ``extra_attributes``. Unknown elements inside a
    ``Vorgang`` or directly under ``Export`` are skipped and reported, with
    their counts, in a single :class:`~parlmine.exceptions.ExportStructureWarning`.

    Args:
        xml_source (str, path or binary file object): The export file.
        source_name (str): Operator supplied name, e.g. parliament and election period.

    Returns:
        RawExport: One :class:`RawProcess` per ``Vorgang`` element, in file order.

    Raises:
        MalformedXml: If the file is not well-formed.
        WrongRootElement: If the root element is not ``Export``.
    """
    try:
        root = ET.parse(xml_source).getroot()
    except ET.ParseError as e:
        raise MalformedXml(str(e), position=getattr(e, 'position', None),
                           source=getattr(xml_source, 'name', source_name)) from e

    if _local_name(root.tag) != ROOT_TAG:
        raise WrongRootElement(f'Expected root element {ROOT_TAG!r}, got {_local_name(root.tag)!r}')

    skipped = Counter()
    processes = []
    for element in root:
        tag = _local_name(element.tag)
        if tag == PROCESS_TAG:
            processes.append(_parse_process(element, skipped))
        else:
            skipped[f'{ROOT_TAG}/{tag}'] += 1

    if skipped:
        summary = ', '.join(f'{tag} ({n})' for tag, n in sorted(skipped.items()))
        warnings.warn(
            f'{source_name}: skipped unknown elements: {summary}',
            category=ExportStructureWarning,
            stacklevel=2
        )

    logger.info('Parsed %d processes, %d documents from %s', len(processes),
                sum(len(p.documents) for p in processes), source_name)
    return RawExport(source_name=source_name, processes=tuple(processes))


def parse_export_file(path, source_name=None):
    """Parse an export file, naming the export after the file if no name is given."""
    if source_name is None:
        source_name = Path(path).stem
    with open(path, 'rb') as f:
        return parse_export(f, source_name)


def scan_export(raw):
    """Report data quality findings of a parsed export.

    Three categories are reported: ``missing-date`` (one per document without
    a date), ``missing-activity`` (one per document missing both ``DokTypL``
    and ``DokArtL``) and ``empty-process`` (one per process without documents).

    Args:
        raw (RawExport): A parsed export.

    Returns:
        list of IngestWarning: Findings in file order.
    """
    findings = []
    for p_idx, process in enumerate(raw.processes):
        if not process.documents:
            findings.append(IngestWarning(
                EMPTY_PROCESS, p_idx, None,
                f'process {process.internal_id or p_idx} has no documents'))
        for d_idx, document in enumerate(process.documents):
            if document.date_text is None:
                findings.append(IngestWarning(
                    MISSING_DATE, p_idx, d_idx,
                    f'document {document.internal_id or d_idx} of process '
                    f'{process.internal_id or p_idx} has no date'))
            if document.dok_typ_l is None and document.dok_art_l is None:
                findings.append(IngestWarning(
                    MISSING_ACTIVITY, p_idx, d_idx,
                    f'document {document.internal_id or d_idx} of process '
                    f'{process.internal_id or p_idx} has neither DokTypL nor DokArtL'))
    return findings


def count_findings(findings):
    """Totals per category of :func:`scan_export` findings.

    Returns:
        dict: Category -> ``(findings, processes)``, where ``processes`` is the
        number of distinct processes with at least one finding of the category.
        Categories are in the order ``missing-date``, ``missing-activity``,
        ``empty-process``; categories without findings are reported as ``(0, 0)``.
    """
    totals = {}
    for category in (MISSING_DATE, MISSING_ACTIVITY, EMPTY_PROCESS):
        matching = [f for f in findings if f.category == category]
        totals[category] = (len(matching), len({f.process_index for f in matching}))
    return totals
