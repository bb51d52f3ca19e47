"""Command-line front end of the study pipeline.

Every subcommand reads its inputs, writes its result and exits with 0 on
success, 1 on a usage error and 2 on a data error. Files are written
atomically; tables without an explicit output file go to standard output.
"""
import argparse
import contextlib
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import pandas as pd

from . import __version__
from .cleaning import clean
from .config import DEFAULT_PROFILE, load_config
from .deviance import (
    HIDE_LAW, HIDE_TIME_RELATED, evaluate_rules, format_rules, induce_rules, read_rules, split_train_test
)
from .enrich import compute_delay_threshold, extract_features, label_delayed, read_feature_csv, read_sidecar_csv
from .eventlog import (
    build_log, concat_logs, filter_by_case_attribute, filter_by_time_window, read_xes, relabel_readings, write_xes
)
from .exceptions import ParlmineError
from .ingest import count_findings, parse_export_file, scan_export
from .metrics import YearlySeries, summarize, yearly_frequencies, yearly_mean_cycle_times
from .stats import compare_cycle_times, correlate_series
from .viz import DottedChartSpec, LineChartSpec, render_dotted_chart, render_yearly_lines

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
HIDING_PROFILES = {'time': HIDE_TIME_RELATED, 'law': HIDE_LAW}
METRICS = {'freq': yearly_frequencies, 'cycle': yearly_mean_cycle_times}
LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


@contextlib.contextmanager
def _atomic_path(path):
    """Yield a temporary path next to ``path`` that replaces ``path`` on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def _write_text(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    with _atomic_path(out) as tmp:
        Path(tmp).write_text(text, encoding='utf-8')
    logger.info('Wrote %s', out)


def _write_log(log, out):
    with _atomic_path(out) as tmp:
        write_xes(log, tmp)
    logger.info('Wrote %s', out)


def _csv(df):
    buffer = io.StringIO()
    df.to_csv(buffer, index=False, lineterminator='\n')
    return buffer.getvalue()


def _default_out(args, name):
    return Path(args.out) if args.out else args.run_config.output_dir / name


def _stem(path):
    return Path(path).stem


# subcommands

def cmd_convert(args):
    profile = args.run_config.profile(args.profile)
    inputs = [Path(p) for p in args.input] or list(profile.inputs)
    if not inputs:
        raise UsageError(f'Profile {profile.name!r} has no inputs, use --input')

    logs = []
    for path in inputs:
        raw = parse_export_file(path)
        findings = scan_export(raw)
        for finding in findings:
            print(f'{path}: {finding.category}: {finding.message}', file=sys.stderr)
        for category, (n_findings, n_processes) in count_findings(findings).items():
            print(f'{path}: total {category}: {n_processes} processes ({n_findings} findings)', file=sys.stderr)
        logs.append(build_log(raw, profile.date_formats))
    log = logs[0] if len(logs) == 1 else concat_logs(logs, name=profile.name, prefix_duplicates=True)
    _write_log(log, _default_out(args, f'{profile.name}.xes'))
    return EXIT_OK


def cmd_clean(args):
    log = read_xes(args.log)
    cleaned, report = clean(log, args.run_config.cleaning)
    _write_log(cleaned, _default_out(args, f'{_stem(args.log)}_clean.xes'))

    as_json = args.report_format == 'json' or (
        args.report_format is None and args.report is not None and str(args.report).endswith('.json'))
    text = report.to_json() + '\n' if as_json else _csv(report.to_frame()[['label', 'traces']])
    _write_text(text, args.report)
    return EXIT_OK


def cmd_filter(args):
    config = args.run_config
    log = read_xes(args.log)
    key = args.case_attribute or config.case_attribute
    value = args.case_value or config.case_value
    log = filter_by_case_attribute(log, key, value)
    if not args.no_window:
        first, last = args.window or config.window
        log = filter_by_time_window(log, first, last)
    if args.profile:
        log = relabel_readings(log, config.profile(args.profile).relabel_rules)
    _write_log(log, _default_out(args, f'{_stem(args.log)}_{value}.xes'))
    return EXIT_OK


def cmd_summarize(args):
    summaries = {_stem(path): summarize(read_xes(path)) for path in args.logs}
    if args.json:
        text = json.dumps({name: s.to_dict() for name, s in summaries.items()}, indent=2) + '\n'
    else:
        df = pd.DataFrame([s.to_dict() for s in summaries.values()])
        df.insert(0, 'log', list(summaries))
        text = _csv(df)
    _write_text(text, args.out)
    return EXIT_OK


def cmd_correlate(args):
    log = read_xes(args.log)
    series = METRICS[args.metric](log)
    sidecar = read_sidecar_csv(args.year_features, key='year')
    context = YearlySeries(args.column, {
        year: row[args.column] for year, row in sidecar.rows.items()
        if isinstance(row.get(args.column), float)
    })
    result = correlate_series(series, context)
    df = pd.DataFrame([{'log': _stem(args.log), 'metric': args.metric, 'column': args.column,
                        **result.to_dict()}])
    _write_text(_csv(df), args.out)
    return EXIT_OK


def cmd_compare(args):
    logs = {_stem(path): read_xes(path) for path in args.logs}
    if len(logs) < 2:
        raise UsageError('compare needs at least two distinct logs')
    results = [
        {'log_a': a, 'log_b': b, **result.to_dict()}
        for (a, b), result in compare_cycle_times(logs).items()
    ]
    _write_text(json.dumps(results, indent=2) + '\n', args.out)
    return EXIT_OK


def cmd_chart_dotted(args):
    log = read_xes(args.log)
    spec = DottedChartSpec(window_days=args.window_days, width_px=args.width, height_px=args.height,
                           title=args.title)
    _write_text(render_dotted_chart(log, spec), _default_out(args, f'{_stem(args.log)}_dotted.svg'))
    return EXIT_OK


def cmd_chart_lines(args):
    labels = args.labels or [_stem(p) for p in args.logs]
    if len(labels) != len(args.logs):
        raise UsageError(f'Got {len(labels)} labels for {len(args.logs)} logs')
    series = tuple((label, METRICS[args.metric](read_xes(path))) for label, path in zip(labels, args.logs))
    y_label = 'Mean cycle time (days)' if args.metric == 'cycle' else 'Traces per year'
    spec = LineChartSpec(series=series, width_px=args.width, height_px=args.height, y_label=y_label,
                         title=args.title)
    _write_text(render_yearly_lines(spec), _default_out(args, f'{args.metric}_per_year.svg'))
    return EXIT_OK


def cmd_features(args):
    config = args.run_config
    log = read_xes(args.log)
    sidecars = []
    year_features = args.sidecar or config.year_features
    doc_features = args.doc_sidecar or config.doc_features
    if year_features:
        sidecars.append(read_sidecar_csv(year_features, key='year'))
    if doc_features:
        sidecars.append(read_sidecar_csv(doc_features, key='case_id'))
    passed = set(args.passed)
    if args.profile:
        passed |= config.profile(args.profile).passed_activities

    table = extract_features(log, sidecars, passed)
    if args.threshold is not None and args.reference_log is not None:
        raise UsageError('Use either --threshold or --reference-log')
    threshold = args.threshold
    if args.reference_log is not None:
        factor = args.delay_factor if args.delay_factor is not None else config.delay_factor
        threshold = compute_delay_threshold(summarize(read_xes(args.reference_log)), factor)
    if threshold is not None:
        table = label_delayed(table, log, threshold)

    _write_text(_csv(table.to_frame().reset_index()), _default_out(args, f'{_stem(args.log)}_features.csv'))
    return EXIT_OK


def _induction_config(args):
    induction = args.run_config.induction
    hidden = list(induction.hidden_patterns) + list(args.hide)
    for name in args.hide_profile:
        hidden.extend(HIDING_PROFILES[name])
    changes = {
        'hidden_patterns': tuple(dict.fromkeys(hidden)),
        'seed': args.seed,
        'max_conditions': getattr(args, 'max_conditions', None),
        'beam_width': getattr(args, 'beam_width', None),
    }
    try:
        return replace(induction, **{k: v for k, v in changes.items() if v is not None})
    except ValueError as e:
        raise UsageError(str(e)) from e


def cmd_induce(args):
    config = _induction_config(args)
    table = read_feature_csv(args.features)
    train, test = split_train_test(table, config)
    rules = induce_rules(train, config)[:args.top]

    header = '\n'.join([
        f'rules induced from {Path(args.features).name}',
        f'train rows {len(train)}, test rows {len(test)}, seed {config.seed}',
        f'hidden patterns: {", ".join(config.hidden_patterns) or "none"}',
    ])
    _write_text(format_rules(rules, header=header), args.out)
    return EXIT_OK


def cmd_eval_rules(args):
    config = _induction_config(args)
    rules = read_rules(Path(args.rules).read_text(encoding='utf-8'), source=args.rules)
    table = read_feature_csv(args.features)
    if args.split == 'test':
        _, table = split_train_test(table, config)
    _write_text(_csv(evaluate_rules(rules, table)), args.out)
    return EXIT_OK


def _add_out(parser, what):
    parser.add_argument('-o', '--out', help=f'{what} (default: see command help)')


def build_parser():
    parser = _Parser(prog='parlmine', description='Process mining of parliamentary lawmaking processes.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--config', help='INI run configuration')
    parser.add_argument('--output', help='output directory for generated files')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for info, -vv for debug')
    commands = parser.add_subparsers(dest='command', metavar='command', parser_class=_Parser)
    commands.required = True

    p = commands.add_parser('convert', help='convert XML exports of a profile to one XES log')
    p.add_argument('profile', nargs='?', default=DEFAULT_PROFILE)
    p.add_argument('--input', action='append', default=[], help='export file, overrides the profile inputs')
    _add_out(p, 'XES file, default <output>/<profile>.xes')
    p.set_defaults(func=cmd_convert)

    p = commands.add_parser('clean', help='remove low-quality traces and report the counts')
    p.add_argument('log')
    _add_out(p, 'cleaned XES file, default <output>/<log>_clean.xes')
    p.add_argument('--report', help='filter report file, default standard output')
    p.add_argument('--report-format', choices=['csv', 'json'])
    p.set_defaults(func=cmd_clean)

    p = commands.add_parser('filter', help='keep legislation traces of the analysis window and relabel readings')
    p.add_argument('log')
    p.add_argument('--case-attribute')
    p.add_argument('--case-value')
    p.add_argument('--window', nargs=2, type=int, metavar=('FIRST', 'LAST'))
    p.add_argument('--no-window', action='store_true')
    p.add_argument('--profile', help='profile whose relabel rules are applied')
    _add_out(p, 'XES file, default <output>/<log>_<value>.xes')
    p.set_defaults(func=cmd_filter)

    p = commands.add_parser('summarize', help='basic properties and cycle time statistics')
    p.add_argument('logs', nargs='+')
    p.add_argument('--json', action='store_true')
    _add_out(p, 'result file, default standard output')
    p.set_defaults(func=cmd_summarize)

    p = commands.add_parser('correlate', help='Pearson correlation of a yearly metric with a sidecar column')
    p.add_argument('log')
    p.add_argument('year_features')
    p.add_argument('--metric', choices=sorted(METRICS), default='freq')
    p.add_argument('--column', default='squire_index')
    _add_out(p, 'CSV file, default standard output')
    p.set_defaults(func=cmd_correlate)

    p = commands.add_parser('compare', help='pairwise Mann-Whitney U tests of cycle times')
    p.add_argument('logs', nargs='+')
    _add_out(p, 'JSON file, default standard output')
    p.set_defaults(func=cmd_compare)

    p = commands.add_parser('chart', help='render SVG charts')
    charts = p.add_subparsers(dest='chart', metavar='kind', parser_class=_Parser)
    charts.required = True
    c = charts.add_parser('dotted', help='dotted chart in relative time')
    c.add_argument('log')
    c.add_argument('--window-days', type=int, default=1461)
    c.add_argument('--width', type=int, default=1200)
    c.add_argument('--height', type=int, default=800)
    c.add_argument('--title')
    _add_out(c, 'SVG file, default <output>/<log>_dotted.svg')
    c.set_defaults(func=cmd_chart_dotted)
    c = charts.add_parser('lines', help='yearly metric, one line per log')
    c.add_argument('logs', nargs='+')
    c.add_argument('--metric', choices=sorted(METRICS), default='cycle')
    c.add_argument('--labels', nargs='+')
    c.add_argument('--width', type=int, default=800)
    c.add_argument('--height', type=int, default=500)
    c.add_argument('--title')
    _add_out(c, 'SVG file, default <output>/<metric>_per_year.svg')
    c.set_defaults(func=cmd_chart_lines)

    p = commands.add_parser('features', help='feature table, labeled when a threshold is known')
    p.add_argument('log')
    p.add_argument('--sidecar', help='year features CSV')
    p.add_argument('--doc-sidecar', help='document features CSV')
    p.add_argument('--profile', help='profile whose passed activities are used')
    p.add_argument('--passed', action='append', default=[], help='activity marking a passed bill')
    p.add_argument('--threshold', type=float, help='delay threshold in days')
    p.add_argument('--reference-log', help='log of the fastest parliament')
    p.add_argument('--delay-factor', type=float)
    _add_out(p, 'CSV file, default <output>/<log>_features.csv')
    p.set_defaults(func=cmd_features)

    for name, func, help_text in [('induce', cmd_induce, 'induce rules explaining delays'),
                                  ('eval-rules', cmd_eval_rules, 'precision and recall of rules')]:
        p = commands.add_parser(name, help=help_text)
        if name == 'eval-rules':
            p.add_argument('rules')
        p.add_argument('features')
        p.add_argument('--seed', type=int)
        p.add_argument('--hide', action='append', default=[], help='hide features containing this text')
        p.add_argument('--hide-profile', action='append', default=[], choices=sorted(HIDING_PROFILES))
        if name == 'induce':
            p.add_argument('--top', type=int, default=5)
            p.add_argument('--max-conditions', type=int)
            p.add_argument('--beam-width', type=int)
        else:
            p.add_argument('--split', choices=['test', 'full'], default='test')
        _add_out(p, 'result file, default standard output')
        p.set_defaults(func=func)

    return parser


def run(argv=None):
    """Run the command line and return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)

    try:
        config = load_config(args.config)
        if args.output:
            config = config.with_overrides(output_dir=Path(args.output))
        args.run_config = config
        return args.func(args)
    except UsageError as e:
        print(f'parlmine: error: {e}', file=sys.stderr)
        return EXIT_USAGE
    except (ParlmineError, OSError, ValueError) as e:
        print(f'parlmine: error: {e}', file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
