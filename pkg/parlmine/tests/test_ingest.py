import io

import pytest

from ..exceptions import ExportStructureWarning, MalformedXml, WrongRootElement
from ..ingest import (
    EMPTY_PROCESS, MISSING_ACTIVITY, MISSING_DATE, count_findings, parse_export, parse_export_file, scan_export
)


def test_parse_export_structure(export_xml):
    raw = parse_export(io.BytesIO(export_xml), 'berlin_wp16')

    assert raw.source_name == 'berlin_wp16'
    assert [p.internal_id for p in raw.processes] == ['100', '101', '102']
    first = raw.processes[0]
    assert first.v_sys_l == 'Gesetzgebung'
    assert first.v_typ_l == 'Gesetzentwurf'
    assert first.side_entries == ('Drucksache 16/1',)
    assert len(first.documents) == 3
    assert raw.processes[2].documents == ()


def test_parse_export_attribute_and_child_forms(export_xml):
    raw = parse_export(io.BytesIO(export_xml), 'berlin_wp16')
    attribute_form, _, child_form = raw.processes[0].documents

    assert attribute_form.date_text == '03.02.2010'
    assert attribute_form.dok_typ_l == 'Drucksache'
    assert attribute_form.dok_art_l == 'Gesetzentwurf'
    assert attribute_form.authors == ('Senat', 'Fraktion A')

    assert child_form.internal_id == '3'
    assert child_form.date_text == '2010-03-15'
    assert child_form.dok_typ_l == 'Beschlussempfehlung'
    assert child_form.descriptors == ('Haushalt', 'Bildung')


def test_unknown_document_property_is_kept():
    xml = b'<Export><Vorgang VNr="1"><Dokument DokNr="9" Seiten="12"/></Vorgang></Export>'
    document = parse_export(io.BytesIO(xml), 'x').processes[0].documents[0]
    assert document.extra_attributes == {'Seiten': '12'}


def test_unknown_process_element_warns():
    xml = b'<Export><Vorgang VNr="1"><Beratungsstand>offen</Beratungsstand></Vorgang></Export>'
    with pytest.warns(ExportStructureWarning, match='Beratungsstand'):
        raw = parse_export(io.BytesIO(xml), 'x')
    assert len(raw.processes) == 1


def test_malformed_xml_has_position():
    with pytest.raises(MalformedXml) as excinfo:
        parse_export(io.BytesIO(b'<Export>\n<Vorgang>\n</Export>'), 'broken')
    line, _ = excinfo.value.position
    assert line == 3


def test_wrong_root_element():
    with pytest.raises(WrongRootElement):
        parse_export(io.BytesIO(b'<Protokolle/>'), 'x')


def test_declared_encoding_is_honored():
    xml = '<?xml version="1.0" encoding="ISO-8859-1"?><Export><Vorgang VNr="1">' \
          '<Dokument DokTypL="Beschlussempfehlung und Bericht" Titel="Änderung"/></Vorgang></Export>'
    raw = parse_export(io.BytesIO(xml.encode('latin-1')), 'x')
    assert raw.processes[0].documents[0].title == 'Änderung'


def test_parse_export_file_names_export_after_file(tmp_path, export_xml):
    path = tmp_path / 'brandenburg_wp5.xml'
    path.write_bytes(export_xml)
    assert parse_export_file(path).source_name == 'brandenburg_wp5'


def test_scan_export(export_xml):
    findings = scan_export(parse_export(io.BytesIO(export_xml), 'x'))

    assert [(f.category, f.process_index, f.document_index) for f in findings] == [
        (MISSING_DATE, 1, 0),
        (EMPTY_PROCESS, 2, None),
    ]


def test_scan_export_missing_activity():
    xml = b'<Export><Vorgang VNr="1"><Dokument DokDat="01.01.2010"/></Vorgang></Export>'
    findings = scan_export(parse_export(io.BytesIO(xml), 'x'))
    assert [f.category for f in findings] == [MISSING_ACTIVITY]


def test_count_findings_per_process():
    xml = b"""<Export>
      <Vorgang VNr="1"><Dokument DokTypL="Drucksache"/><Dokument/></Vorgang>
      <Vorgang VNr="2"><Dokument DokDat="01.01.2010" DokTypL="Drucksache"/></Vorgang>
      <Vorgang VNr="3"/>
    </Export>"""
    totals = count_findings(scan_export(parse_export(io.BytesIO(xml), 'x')))
    assert totals == {
        MISSING_DATE: (2, 1),
        MISSING_ACTIVITY: (1, 1),
        EMPTY_PROCESS: (1, 1),
    }


def test_nested_document_properties_are_flattened(recwarn):
    xml = b"""<Export><Vorgang VNr="1"><Dokument DokNr="9">
      <Urheber><Person>Senat</Person><Person>Fraktion A</Person></Urheber>
      <Fundstelle><Seite>12</Seite><Spalte>3</Spalte></Fundstelle>
      <Quelle Band="4"/>
    </Dokument></Vorgang></Export>"""
    document = parse_export(io.BytesIO(xml), 'x').processes[0].documents[0]

    assert document.authors == ('Senat', 'Fraktion A')
    assert document.extra_attributes == {'Fundstelle': '12 3', 'Quelle': '4'}
    assert not [w for w in recwarn if issubclass(w.category, ExportStructureWarning)]


def test_unknown_export_element_warns():
    xml = b'<Export><Metadaten>Stand 2020</Metadaten><Vorgang VNr="1"/><Metadaten/></Export>'
    with pytest.warns(ExportStructureWarning, match=r'Export/Metadaten \(2\)'):
        raw = parse_export(io.BytesIO(xml), 'x')
    assert [p.internal_id for p in raw.processes] == ['1']


def _random_export(rng, n_processes):
    parts = ['<Export>']
    for p in range(n_processes):
        parts.append(f'<Vorgang VNr="{p}" VSysL="{rng.choice(["Gesetzgebung", "Anfrage"])}">')
        for d in range(rng.randint(0, 6)):
            date = f'{rng.randint(1, 29):02d}.{rng.randint(1, 13):02d}.{rng.randint(1990, 2020)}'
            if rng.rand() < 0.5:
                parts.append(f'<Dokument DokNr="{p}-{d}" DokDat="{date}" DokTypL="Drucksache"/>')
            else:
                parts.append(f'<Dokument><DokNr>{p}-{d}</DokNr><DokDat>{date}</DokDat>'
                             f'<Desk>Haushalt</Desk></Dokument>')
        parts.append('</Vorgang>')
    parts.append('</Export>')
    return ''.join(parts).encode('utf-8')


def test_parse_export_keeps_every_process_and_document(rng):
    xml = _random_export(rng, rng.randint(0, 30))
    raw = parse_export(io.BytesIO(xml), 'x')

    assert len(raw.processes) == xml.count(b'<Vorgang ')
    assert sum(len(p.documents) for p in raw.processes) == xml.count(b'<Dokument')
    assert parse_export(io.BytesIO(xml), 'x') == raw
