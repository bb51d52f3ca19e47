from datetime import date

import matplotlib.pyplot as plt
import pytest
from matplotlib import colormaps
from matplotlib.colors import to_hex

from ..eventlog import Event, EventLog, Trace
from ..exceptions import EmptyLog, EmptySeries
from ..metrics import YearlySeries
from ..viz import (
    DottedChartSpec, LineChartSpec, activity_colors, dotted_chart_data, plot_dotted_chart, plot_yearly_lines,
    render_dotted_chart, render_yearly_lines
)
from .conftest import make_trace, random_log


@pytest.fixture(autouse=True)
def close_figures():
    yield
    plt.close('all')


@pytest.fixture
def chart_log():
    return EventLog('berlin', [
        make_trace('slow', [0, 30, 400], ['1. Lesung', 'Sitzung', '2. Lesung']),
        make_trace('fast', [0, 5], ['1. Lesung', 'Sitzung']),
        make_trace('tie-b', [0, 30], ['Sitzung', 'Sitzung']),
        make_trace('tie-a', [0, 30], ['Ausschuss', 'Sitzung']),
        make_trace('long', [0, 100, 2000], ['1. Lesung', 'Sitzung', '2. Lesung']),
        Trace('undated', {}, [Event('Sitzung', None, {})]),
    ])


def test_dotted_chart_row_order(chart_log):
    df = dotted_chart_data(chart_log)
    rows = df.drop_duplicates('row').set_index('row')['case_id']
    assert rows.tolist() == ['fast', 'tie-a', 'tie-b', 'slow', 'long']


def test_dotted_chart_clips_window(chart_log):
    df = dotted_chart_data(chart_log, DottedChartSpec(window_days=365))
    assert df['day'].max() <= 365
    assert df[df['case_id'] == 'slow']['day'].tolist() == [0, 30]


def test_dotted_chart_single_event_trace():
    df = dotted_chart_data(EventLog('x', [make_trace('one', [0])]))
    assert df[['row', 'day']].values.tolist() == [[0, 0]]


def test_dotted_chart_rows_follow_cycle_time(rng):
    log = random_log(rng, n_traces=30)
    df = dotted_chart_data(log, DottedChartSpec(window_days=10000))
    cycle = df.groupby('row')['day'].max()
    assert cycle.is_monotonic_increasing


def test_dotted_chart_colors(chart_log):
    spec = DottedChartSpec(color_map={'Sitzung': 'black'})
    df = dotted_chart_data(chart_log, spec)
    colors = df.drop_duplicates('activity').set_index('activity')['color']
    assert colors['Sitzung'] == '#000000'
    assert colors['1. Lesung'] != colors['2. Lesung']


def test_activity_colors_distinct():
    few = activity_colors(['b', 'a', 'c', 'a'])
    assert list(few) == ['a', 'b', 'c']
    assert few['a'] == to_hex(colormaps['tab20'].colors[0])
    many = activity_colors([f'activity {i:02d}' for i in range(35)])
    assert len(set(many.values())) == 35


def test_dotted_chart_spec_validation():
    with pytest.raises(ValueError):
        DottedChartSpec(window_days=0)
    with pytest.raises(ValueError):
        DottedChartSpec(color_map={'a': 'red', 'b': '#ff0000'})


def test_dotted_chart_empty_log():
    with pytest.raises(EmptyLog):
        dotted_chart_data(EventLog('x', [Trace('undated', {}, [Event('Sitzung', None, {})])]))


def test_plot_dotted_chart(chart_log):
    ax = plot_dotted_chart(chart_log, DottedChartSpec(window_days=730))
    assert ax.get_xlim() == (0, 730)
    bottom, top = ax.get_ylim()
    assert bottom > top
    assert [t.get_text() for t in ax.get_legend().get_texts()] == ['1. Lesung', '2. Lesung', 'Ausschuss', 'Sitzung']
    assert ax.get_title() == 'berlin: 5 traces'


def test_render_dotted_chart_deterministic(chart_log):
    first = render_dotted_chart(chart_log)
    second = render_dotted_chart(chart_log)
    assert first == second
    assert first.lstrip().startswith('<?xml')
    assert '<svg' in first


def _series(points):
    return YearlySeries('mean_cycle_days', points)


def test_plot_yearly_lines():
    spec = LineChartSpec(series=(
        ('berlin', _series({2010: 100.0, 2011: 120.0})),
        ('brandenburg', _series({2010: 200.0, 2012: 80.0})),
        ('baden-wuerttemberg', _series({2011: 50.0})),
    ), y_label='days')
    ax = plot_yearly_lines(spec)

    assert [t.get_text() for t in ax.get_legend().get_texts()] == ['berlin', 'brandenburg', 'baden-wuerttemberg']
    assert ax.get_ylim() == pytest.approx((0, 210.0))
    assert ax.get_ylabel() == 'days'
    assert len(ax.get_lines()) == 3


def test_plot_yearly_lines_constant_zero():
    ax = plot_yearly_lines(LineChartSpec(series=(('x', _series({2010: 0.0, 2011: 0.0})),)))
    assert ax.get_ylim() == (0, 1.0)


def test_render_yearly_lines_single_point():
    svg = render_yearly_lines(LineChartSpec(series=(('x', _series({2015: 3.0})),)))
    assert '<svg' in svg


@pytest.mark.parametrize('series', [(), (('empty', YearlySeries('frequency')),)])
def test_plot_yearly_lines_empty(series):
    with pytest.raises(EmptySeries):
        plot_yearly_lines(LineChartSpec(series=series))


def test_line_chart_spec_validation():
    with pytest.raises(ValueError):
        LineChartSpec(width_px=0)


def test_dotted_chart_unnamed_activity():
    log = EventLog('x', [Trace('a', {}, [Event(None, date(2010, 1, 1), {})])])
    assert dotted_chart_data(log)['activity'].tolist() == ['(unnamed)']
