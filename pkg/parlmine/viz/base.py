import io
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
from matplotlib import colormaps
from matplotlib.colors import to_hex
from matplotlib.ticker import MaxNLocator

from ..cleaning import cycle_time_days
from ..exceptions import EmptyLog, EmptySeries

DPI = 100
UNNAMED_ACTIVITY = '(unnamed)'
SVG_HASH_SALT = 'parlmine'


@dataclass(frozen=True)
class DottedChartSpec:
    """Layout of a dotted chart.

    Args:
        window_days (int): Days of relative time shown. Default is 1461 (four years).
        width_px (int): Image width. Default is 1200.
        height_px (int): Image height. Default is 800.
        color_map (dict, optional): Activity -> color. Activities missing from it get
            colors assigned by :func:`activity_colors`.
        dot_radius_px (float): Dot radius. Default is 2.
        title (str, optional): Chart title.
    """

    window_days: int = 1461
    width_px: int = 1200
    height_px: int = 800
    color_map: Optional[Dict[str, str]] = None
    dot_radius_px: float = 2
    title: Optional[str] = None

    def __post_init__(self):
        if self.window_days <= 0:
            raise ValueError(f'window_days should be positive. Invalid value: {self.window_days}')
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError(f'Image size should be positive, got {self.width_px}x{self.height_px}')
        if self.dot_radius_px <= 0:
            raise ValueError(f'dot_radius_px should be positive. Invalid value: {self.dot_radius_px}')
        if self.color_map is not None:
            colors = [to_hex(c) for c in self.color_map.values()]
            if len(set(colors)) != len(colors):
                raise ValueError('Every activity needs its own color')


@dataclass(frozen=True)
class LineChartSpec:
    """Layout of a chart with one line per yearly series.

    Args:
        series (tuple of (str, YearlySeries)): Labeled series, drawn in this order.
        width_px (int): Image width. Default is 800.
        height_px (int): Image height. Default is 500.
        y_label (str): Label of the y axis.
        title (str, optional): Chart title.
    """

    series: Tuple[Tuple[str, object], ...] = field(default_factory=tuple)
    width_px: int = 800
    height_px: int = 500
    y_label: str = ''
    title: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'series', tuple((label, s) for label, s in self.series))
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError(f'Image size should be positive, got {self.width_px}x{self.height_px}')


def activity_colors(activities):
    """Assign a distinct color to each activity, in lexicographic order of the activities.

    Up to 20 activities take the ``tab20`` palette, more are spread evenly over the hue circle.

    Returns:
        dict: Activity -> hex color.
    """
    activities = sorted(set(activities))
    if len(activities) <= 20:
        palette = colormaps['tab20'].colors
    else:
        palette = colormaps['hsv'](np.linspace(0, 1, len(activities), endpoint=False))
    return {a: to_hex(c) for a, c in zip(activities, palette)}


def dotted_chart_data(log, spec=None):
    """Points of a dotted chart.

    Every trace with a timestamp is one row, rows ordered by ascending cycle time
    and case id on ties. The x value of an event is the number of days since the
    first event of its trace. Events after ``spec.window_days`` are clipped.

    Args:
        log (EventLog): An event log.
        spec (DottedChartSpec, optional): Default is ``DottedChartSpec()``.

    Returns:
        pandas.DataFrame: Columns ``row``, ``case_id``, ``activity``, ``day`` and ``color``.

    Raises:
        EmptyLog: If ``log`` has no trace with a timestamp.
    """
    if spec is None:
        spec = DottedChartSpec()
    traces = [t for t in log.traces if t.start is not None]
    if not traces:
        raise EmptyLog(f'Log {log.name!r} has no timestamped trace to draw')
    traces.sort(key=lambda t: (cycle_time_days(t), t.case_id))

    points = []
    for row, trace in enumerate(traces):
        for event in trace.events:
            if event.timestamp is None:
                continue
            day = (event.timestamp - trace.start).days
            if day <= spec.window_days:
                activity = event.activity if event.activity else UNNAMED_ACTIVITY
                points.append((row, trace.case_id, activity, day))
    df = pd.DataFrame(points, columns=['row', 'case_id', 'activity', 'day'])

    colors = activity_colors(df['activity'])
    if spec.color_map:
        colors.update({a: to_hex(c) for a, c in spec.color_map.items()})
    df['color'] = df['activity'].map(colors)
    return df


def plot_dotted_chart(log, spec=None, ax=None):
    """Plot a dotted chart of a log in relative time.

    Args:
        log (EventLog): An event log.
        spec (DottedChartSpec, optional): Default is ``DottedChartSpec()``.
        ax (matplotlib.axes.Axes, optional): Axes to draw on. A new figure is created if omitted.

    Returns:
        matplotlib.axes.Axes: The axes drawn on.

    See also:
        :func:`.dotted_chart_data`: The plotted points.
    """
    if spec is None:
        spec = DottedChartSpec()
    df = dotted_chart_data(log, spec)
    n_rows = len([t for t in log.traces if t.start is not None])

    if ax is None:
        _, ax = plt.subplots(ncols=1, nrows=1, figsize=(spec.width_px / DPI, spec.height_px / DPI), dpi=DPI)

    size = (2 * spec.dot_radius_px * 72.0 / DPI) ** 2
    for activity, group in df.groupby('activity', sort=True):
        ax.scatter(group['day'], group['row'], s=size, c=group['color'].iloc[0], label=activity,
                   marker='o', linewidths=0)

    ax.set_xlim(0, spec.window_days)
    ax.set_ylim(n_rows - 0.5, -0.5)
    ax.set_xlabel('Days since first event')
    ax.set_ylabel('Traces by cycle time')
    ax.set_yticks([])
    ax.legend(loc='upper left', bbox_to_anchor=(1.0, 1.0), fontsize='small', markerscale=3, frameon=False)
    ax.set_title(spec.title if spec.title is not None else f'{log.name}: {n_rows} traces')
    return ax


def plot_yearly_lines(spec, ax=None):
    """Plot one line per yearly series, e.g. mean cycle times per parliament.

    The y axis runs from 0 to 1.05 times the largest value.

    Args:
        spec (LineChartSpec): Series and layout.
        ax (matplotlib.axes.Axes, optional): Axes to draw on. A new figure is created if omitted.

    Returns:
        matplotlib.axes.Axes: The axes drawn on.

    Raises:
        EmptySeries: If there is no series or a series has no point.
    """
    if not spec.series:
        raise EmptySeries('A line chart needs at least one series')
    for label, series in spec.series:
        if len(series) == 0:
            raise EmptySeries(f'Series {label!r} has no point')

    if ax is None:
        _, ax = plt.subplots(ncols=1, nrows=1, figsize=(spec.width_px / DPI, spec.height_px / DPI), dpi=DPI)

    palette = colormaps['tab10'].colors
    for i, (label, series) in enumerate(spec.series):
        ax.plot(series.years, series.values, marker='o', label=label, color=to_hex(palette[i % len(palette)]))

    top = max(max(series.values) for _, series in spec.series)
    ax.set_ylim(0, 1.05 * top if top > 0 else 1.0)
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_xlabel('Year')
    ax.set_ylabel(spec.y_label)
    ax.legend(loc='best')
    if spec.title:
        ax.set_title(spec.title)
    return ax


def figure_to_svg(fig):
    """Render a figure to an SVG document and close it.

    Identical figures give byte-identical documents: the creation date is left
    out and element ids are derived from a fixed salt.
    """
    buffer = io.StringIO()
    with plt.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'path'}):
        fig.savefig(buffer, format='svg', dpi=DPI, metadata={'Date': None})
    plt.close(fig)
    return buffer.getvalue()


def render_dotted_chart(log, spec=None):
    """Dotted chart of ``log`` as an SVG document.

    See also:
        :func:`.plot_dotted_chart`
    """
    ax = plot_dotted_chart(log, spec)
    ax.figure.tight_layout()
    return figure_to_svg(ax.figure)


def render_yearly_lines(spec):
    """Yearly line chart as an SVG document.

    See also:
        :func:`.plot_yearly_lines`
    """
    ax = plot_yearly_lines(spec)
    ax.figure.tight_layout()
    return figure_to_svg(ax.figure)
