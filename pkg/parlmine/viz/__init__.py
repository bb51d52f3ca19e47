from .base import (
    DottedChartSpec, LineChartSpec,
    activity_colors, dotted_chart_data, plot_dotted_chart, plot_yearly_lines,
    render_dotted_chart, render_yearly_lines, figure_to_svg
)

__all__ = [
    'DottedChartSpec', 'LineChartSpec',
    'activity_colors', 'dotted_chart_data', 'plot_dotted_chart', 'plot_yearly_lines',
    'render_dotted_chart', 'render_yearly_lines', 'figure_to_svg'
]
