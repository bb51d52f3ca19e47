"""Run configuration read from an INI file.

Example::

    [parlmine]
    output_dir = out
    year_features = data/year_features.csv

    [profile:berlin]
    inputs = data/berlin_wp16.xml, data/berlin_wp17.xml
    date_formats = %d.%m.%Y
    passed_activities = Gesetz- und Verordnungsblatt
    relabel =
        Plenarprotokoll @Titel~^1\\. => 1. Lesung
        Plenarprotokoll @Titel~^2\\. => 2. Lesung

Every option has a default, so a missing file or section is valid. Relative
paths are resolved against the directory of the configuration file.
"""
import configparser
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, FrozenSet, Optional, Tuple

from .cleaning import CleaningPolicy
from .deviance import InductionConfig
from .enrich import DEFAULT_DELAY_FACTOR
from .eventlog import DEFAULT_DATE_FORMATS, RelabelRule, parse_relabel_rule
from .exceptions import ConfigError, InvalidPattern

logger = logging.getLogger(__name__)

MAIN_SECTION = 'parlmine'
CLEANING_SECTION = 'cleaning'
INDUCTION_SECTION = 'induction'
PROFILE_PREFIX = 'profile:'
DEFAULT_PROFILE = 'default'


@dataclass(frozen=True)
class ParliamentProfile:
    """Inputs and vocabulary of one parliament."""

    name: str
    inputs: Tuple[Path, ...] = ()
    date_formats: Tuple[str, ...] = DEFAULT_DATE_FORMATS
    relabel_rules: Tuple[RelabelRule, ...] = ()
    passed_activities: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class RunConfig:
    """Everything a study run needs, with the defaults of the original study."""

    profiles: Dict[str, ParliamentProfile] = field(default_factory=dict)
    output_dir: Path = Path('.')
    window: Tuple[int, int] = (2006, 2020)
    delay_factor: float = DEFAULT_DELAY_FACTOR
    case_attribute: str = 'VSysL'
    case_value: str = 'Gesetzgebung'
    year_features: Optional[Path] = None
    doc_features: Optional[Path] = None
    cleaning: CleaningPolicy = field(default_factory=CleaningPolicy)
    induction: InductionConfig = field(default_factory=InductionConfig)

    def profile(self, name):
        """The profile called ``name``; an empty default profile if no profile is configured.

        Raises:
            ConfigError: If profiles are configured and none is called ``name``.
        """
        if name in self.profiles:
            return self.profiles[name]
        if not self.profiles or name == DEFAULT_PROFILE:
            return ParliamentProfile(name=name)
        raise ConfigError(f'Unknown profile {name!r}, configured profiles are {sorted(self.profiles)}')

    def with_overrides(self, **changes):
        """Copy with command-line overrides; ``None`` values are ignored."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _split(value, lines_only=False):
    parts = value.splitlines() if lines_only else re.split(r'[\n,]', value)
    return tuple(p.strip() for p in parts if p.strip())


def _path(value, base_dir):
    path = Path(value).expanduser()
    return path if path.is_absolute() else base_dir / path


def _get(section, key, convert, default):
    if key not in section:
        return default
    try:
        return convert(section[key])
    except ValueError as e:
        raise ConfigError(f'[{section.name}] {key}: {e}') from e


def _read_profile(name, section, base_dir):
    if not name:
        raise ConfigError(f'Empty profile name in section [{section.name}]')
    inputs = tuple(_path(p, base_dir) for p in _split(section.get('inputs', '')))
    if 'inputs' in section and not inputs:
        raise ConfigError(f'[{section.name}] inputs: at least one path is required')
    try:
        rules = tuple(parse_relabel_rule(r) for r in _split(section.get('relabel', ''), lines_only=True))
    except InvalidPattern as e:
        raise ConfigError(f'[{section.name}] relabel: {e}') from e
    date_formats = _split(section.get('date_formats', '')) or DEFAULT_DATE_FORMATS
    return ParliamentProfile(
        name=name,
        inputs=inputs,
        date_formats=date_formats,
        relabel_rules=rules,
        passed_activities=frozenset(_split(section.get('passed_activities', ''))),
    )


def parse_config(text, base_dir='.'):
    """Read a configuration from INI text.

    Args:
        text (str): INI content.
        base_dir (str or Path): Directory relative paths are resolved against.

    Returns:
        RunConfig: The configuration.

    Raises:
        ConfigError: If a value is invalid or a section occurs twice.
    """
    base_dir = Path(base_dir)
    # strptime patterns contain '%'
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(str(e)) from e

    main = parser[MAIN_SECTION] if parser.has_section(MAIN_SECTION) else parser[parser.default_section]
    cleaning_section = parser[CLEANING_SECTION] if parser.has_section(CLEANING_SECTION) else {}
    induction_section = parser[INDUCTION_SECTION] if parser.has_section(INDUCTION_SECTION) else {}

    defaults = RunConfig()
    policy = CleaningPolicy()
    induction = InductionConfig()
    try:
        if cleaning_section:
            policy = CleaningPolicy(
                min_year=_get(cleaning_section, 'min_year', int, policy.min_year),
                max_year=_get(cleaning_section, 'max_year', int, policy.max_year),
                max_cycle_days=_get(cleaning_section, 'max_cycle_days', int, policy.max_cycle_days),
                fallback_attribute=cleaning_section.get('fallback_attribute', policy.fallback_attribute),
                fallback_excluded_values=_get(cleaning_section, 'fallback_excluded_values',
                                              lambda v: frozenset(_split(v)), policy.fallback_excluded_values),
            )
        if induction_section:
            induction = InductionConfig(
                test_fraction=_get(induction_section, 'test_fraction', float, induction.test_fraction),
                seed=_get(induction_section, 'seed', int, induction.seed),
                hidden_patterns=_get(induction_section, 'hidden_patterns', _split, induction.hidden_patterns),
                max_conditions=_get(induction_section, 'max_conditions', int, induction.max_conditions),
                beam_width=_get(induction_section, 'beam_width', int, induction.beam_width),
            )
        window = (
            _get(main, 'window_first_year', int, defaults.window[0]),
            _get(main, 'window_last_year', int, defaults.window[1]),
        )
        delay_factor = _get(main, 'delay_factor', float, defaults.delay_factor)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from e
    if window[0] > window[1]:
        raise ConfigError(f'window_first_year {window[0]} lies after window_last_year {window[1]}')

    profiles = {}
    for section_name in parser.sections():
        if section_name.startswith(PROFILE_PREFIX):
            name = section_name[len(PROFILE_PREFIX):].strip()
            if name in profiles:
                raise ConfigError(f'Profile {name!r} is defined twice')
            profiles[name] = _read_profile(name, parser[section_name], base_dir)

    config = RunConfig(
        profiles=profiles,
        output_dir=_get(main, 'output_dir', lambda v: _path(v, base_dir), base_dir),
        window=window,
        delay_factor=delay_factor,
        case_attribute=main.get('case_attribute', defaults.case_attribute),
        case_value=main.get('case_value', defaults.case_value),
        year_features=_get(main, 'year_features', lambda v: _path(v, base_dir), None),
        doc_features=_get(main, 'doc_features', lambda v: _path(v, base_dir), None),
        cleaning=policy,
        induction=induction,
    )
    logger.debug('Configuration with profiles %s', sorted(profiles))
    return config


def load_config(path=None):
    """Read the configuration file at ``path``; the defaults if ``path`` is ``None``."""
    if path is None:
        return RunConfig()
    path = Path(path)
    return parse_config(path.read_text(encoding='utf-8'), base_dir=path.parent)
