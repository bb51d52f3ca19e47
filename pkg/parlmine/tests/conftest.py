import string
from datetime import date, timedelta

import matplotlib
import numpy as np
import pytest

from ..enrich import FeatureRow, FeatureTable
from ..eventlog import Event, EventLog, Trace

matplotlib.use('Agg')

seeds = tuple(range(5))

EXPORT_XML = """<?xml version="1.0" encoding="UTF-8"?>
<Export>
  <Vorgang VNr="100" VTyp="GE" VTypL="Gesetzentwurf" VSys="G" VSysL="Gesetzgebung">
    <Nebeneintrag>Drucksache 16/1</Nebeneintrag>
    <Dokument DokNr="1" DokDat="03.02.2010" DokTypL="Drucksache" DokArtL="Gesetzentwurf"
              Titel="Entwurf eines Gesetzes" Urheber="Senat; Fraktion A"/>
    <Dokument DokNr="2" DokDat="10.01.2010" DokTypL="Plenarprotokoll" Titel="1. Lesung"/>
    <Dokument>
      <DokNr>3</DokNr>
      <DokDat>2010-03-15</DokDat>
      <DokTypL>Beschlussempfehlung</DokTypL>
      <Desk>Haushalt</Desk>
      <Desk>Bildung</Desk>
    </Dokument>
  </Vorgang>
  <Vorgang VNr="101" VSysL="Anfrage">
    <Dokument DokNr="4" DokTypL="Kleine Anfrage"/>
    <Dokument DokNr="5" DokDat="01.06.2012" DokArtL="Antwort"/>
  </Vorgang>
  <Vorgang VNr="102" VSysL="Gesetzgebung">
  </Vorgang>
</Export>
"""


@pytest.fixture
def export_xml():
    return EXPORT_XML.encode('utf-8')


def _random_text(rng, length=8):
    alphabet = list(string.ascii_letters + string.digits + ' .:-äöüß')
    return ''.join(rng.choice(alphabet, size=length)).strip() or 'x'


def _random_value(rng):
    kind = rng.randint(5)
    if kind == 0:
        return _random_text(rng)
    if kind == 1:
        return float(np.round(rng.normal(0, 100), 3))
    if kind == 2:
        return bool(rng.randint(2))
    if kind == 3:
        return date(1990, 1, 1) + timedelta(days=int(rng.randint(0, 12000)))
    return tuple(_random_text(rng, 5) for _ in range(rng.randint(0, 4)))


def random_log(rng, n_traces=20, activities=None, with_gaps=True, name='random'):
    """Event log with random traces.

    With ``with_gaps`` some events lack an activity or a timestamp and
    attributes take every supported type.
    """
    if activities is None:
        activities = ['1. Lesung', '2. Lesung', 'Sitzung', 'Ausschuss', 'Gesetz- und Verordnungsblatt']
    traces = []
    for i in range(n_traces):
        start = date(2000, 1, 1) + timedelta(days=int(rng.randint(0, 7000)))
        offsets = np.sort(rng.randint(0, 900, size=rng.randint(1, 9)))
        events = []
        for offset in offsets:
            activity = str(rng.choice(activities))
            timestamp = start + timedelta(days=int(offset))
            attributes = {}
            if with_gaps:
                if rng.rand() < 0.05:
                    activity = None
                if rng.rand() < 0.05:
                    timestamp = None
                attributes = {f'attr{k}': _random_value(rng) for k in range(rng.randint(0, 4))}
            events.append(Event(activity, timestamp, attributes))
        events.sort(key=lambda e: (e.timestamp is None, e.timestamp or date.min))
        case_attributes = {'VSysL': str(rng.choice(['Gesetzgebung', 'Anfrage']))}
        if with_gaps:
            case_attributes.update({f'case{k}': _random_value(rng) for k in range(rng.randint(0, 3))})
        traces.append(Trace(f'c{i:04d}', case_attributes, events))
    return EventLog(name=name, traces=traces, provenance={'source': name})


def make_trace(case_id, days, activities=None, start=date(2010, 1, 1), case_attributes=None):
    """Trace with events ``days`` after ``start``."""
    if activities is None:
        activities = ['Sitzung'] * len(days)
    events = [Event(a, start + timedelta(days=d), {}) for a, d in zip(activities, days)]
    return Trace(case_id, case_attributes or {'VSysL': 'Gesetzgebung'}, events)


@pytest.fixture(params=seeds)
def rng(request):
    return np.random.RandomState(request.param)


@pytest.fixture
def planted_table():
    """Delay label is ``event_count >= 8`` exactly; two noise features."""
    rng = np.random.RandomState(42)
    rows = []
    for i in range(300):
        event_count = float(rng.randint(1, 16))
        rows.append(FeatureRow(
            case_id=f'c{i:04d}',
            features={
                'event_count': event_count,
                'noise': float(np.round(rng.normal(0, 1), 4)),
                'is_passed_bill': bool(rng.randint(2)),
            },
            is_delayed=event_count >= 8,
        ))
    return FeatureTable(rows=rows)


def noisy_planted_table(seed, n=400, noise=0.05):
    """Delay label is ``sitzung_count >= 5`` with a share ``noise`` of flipped labels."""
    rng = np.random.RandomState(seed)
    rows = []
    for i in range(n):
        count = float(rng.randint(0, 11))
        label = count >= 5
        if rng.rand() < noise:
            label = not label
        features = {
            'Sitzung.count': count,
            'workload': float(rng.randint(1, 60)),
            'start_month': float(rng.randint(1, 13)),
        }
        if rng.rand() < 0.7:
            features['1. Lesung:Sitzung.delay'] = float(rng.randint(0, 200))
        rows.append(FeatureRow(f'c{i:04d}', features, is_delayed=label))
    return FeatureTable(rows=rows)
