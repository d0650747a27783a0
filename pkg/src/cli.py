"""Command-line front end: certify, tables, molien and orbit.

Exit codes: 0 on PASS (or all table rows matching), 1 on a FAIL verdict or a
table mismatch, 2 on malformed input.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from src.cache import CachedHistogramProvider
from src.certifier import certify, enumerate_candidate_sets
from src.config import RunConfig
from src.coxeter import build_group, catalog, fundamental_covector, orbit
from src.errors import BudgetExceeded, CacheError, CoxhessError
from src.logger import get_logger
from src.models import TableRow
from src.molien import CovariantClass, covariant_series, numerator, recover_degrees
from src.reference_data import EXCEPTIONAL_LABELS, REFERENCE_ROWS, TABLE_SOURCE, reference_row
from src.stabilizer_chain import EnumerationMode
from src.ui_display import UIDisplay, format_polynomial

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

MATCH = "MATCH"
MISMATCH = "MISMATCH"
SKIPPED = "SKIPPED"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--v', dest='v', default=None,
                        help='Point in simple-root coordinates, e.g. "1,2,3" or "1/2,-3"')
    common.add_argument('--numerator', choices=['computed', 'paper-table'], default=None,
                        help='Where the Sym^2 numerator comes from (default: computed)')
    common.add_argument('--threads', type=int, default=None, help='Worker threads for the histogram job')
    common.add_argument('--truncation', type=int, default=None, help='Series truncation order (default: 64)')
    common.add_argument('--cache-dir', default=None, help='Histogram cache directory')
    common.add_argument('--long', action='store_true', help='Allow enumeration of very large groups (E8)')
    common.add_argument('--mode', choices=['chain', 'bfs'], default=None,
                        help='Group enumeration: resumable stabilizer-chain blocks or breadth-first')
    common.add_argument('--bfs-budget', type=int, default=None, help='Element bound for --mode bfs')
    common.add_argument('--json', dest='json_path', default=None, help='Write the result as JSON to this path')
    common.add_argument('--config', default='config/config.json', help='Configuration file')
    common.add_argument('--log-dir', default=None, help='Directory for log files')
    common.add_argument('--verbose', action='store_true', help='Log progress to standard error')

    parser = argparse.ArgumentParser(
        prog='coxhess',
        description='Exact Hessian-basis certification for finite reflection groups')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('certify', parents=[common], help='Certify one group')
    p.add_argument('group', help='Group label, e.g. H3, E8, A2, A1xA2')

    p = sub.add_parser('tables', parents=[common], help='Compare computed values with the reference tables')
    p.add_argument('groups', nargs='*', help='Group labels (default: all six exceptional groups)')

    p = sub.add_parser('molien', parents=[common], help='Print a covariant Molien series')
    p.add_argument('group')
    p.add_argument('--class', dest='covariant_class', default='sym2',
                   choices=[c.value for c in CovariantClass])

    p = sub.add_parser('orbit', parents=[common], help='Print the orbit of the last fundamental covector')
    p.add_argument('group')
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """File and environment first, then command-line flags."""
    config = RunConfig.load_from_file(args.config)
    config.command = args.command
    if args.command == 'tables':
        config.groups = list(args.groups) or list(EXCEPTIONAL_LABELS)
    else:
        config.groups = [args.group]
    if args.v is not None:
        config.v_override = RunConfig.parse_point(args.v)
    if args.numerator is not None:
        config.numerator_source = args.numerator
    if args.threads is not None:
        config.workers = args.threads
    if args.truncation is not None:
        config.truncation_order = args.truncation
        config.degree_truncation_order = max(config.degree_truncation_order, args.truncation)
    if args.cache_dir is not None:
        config.cache_dir = args.cache_dir
    if args.long:
        config.long_mode = True
    if args.mode is not None:
        config.enumeration_mode = args.mode
    if args.bfs_budget is not None:
        config.bfs_budget = args.bfs_budget
    if args.json_path is not None:
        config.output_path = args.json_path
    if args.log_dir is not None:
        config.log_dir = args.log_dir
    if getattr(args, 'covariant_class', None):
        config.covariant_class = args.covariant_class
    config.validate()
    return config


def make_provider(config: RunConfig) -> CachedHistogramProvider:
    return CachedHistogramProvider(
        cache_dir=config.cache_dir,
        workers=config.workers,
        partitions=config.effective_partitions,
        chunk_size=config.chunk_size,
        max_order=config.max_order(),
        expected_orders={label: row.order for label, row in REFERENCE_ROWS.items()},
        monitor_interval=config.monitor_interval_seconds,
        memory_warning_percent=config.memory_warning_percent,
        mode=EnumerationMode(config.enumeration_mode.upper()),
        bfs_budget=config.bfs_budget,
    )


def _write_json(payload, path: str) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(payload, f, indent=2)


def cmd_certify(config: RunConfig, display: UIDisplay) -> int:
    label = config.groups[0]
    config.validate_for_group(label)
    run_log = get_logger(config.log_dir)
    provider = make_provider(config)
    report = certify(
        label,
        v=config.v_override,
        numerator_source=config.numerator_source,
        histogram_provider=provider,
        truncation_order=config.truncation_order,
        degree_truncation_order=config.degree_truncation_order,
    )
    run_log.log_certification(report)
    if config.output_path:
        run_log.save_report(report.to_dict(include_timings=True), config.output_path)
    display.print(display.render_report(report))
    return EXIT_OK if report.passed else EXIT_FAIL


def _row(label: str, quantity: str, computed, expected, note: str = "") -> TableRow:
    status = MATCH if computed == expected else MISMATCH
    return TableRow(label, quantity, str(computed), str(expected), status, note)


def table_rows(label: str, config: RunConfig, provider: CachedHistogramProvider) -> List[TableRow]:
    """Computed-vs-reference rows for one exceptional group."""
    row = reference_row(label)
    if row is None:
        raise ValueError(f"{label}: no reference row; tables cover {', '.join(EXCEPTIONAL_LABELS)}")
    group = build_group(catalog(label))
    rows = []

    size = len(orbit(group, fundamental_covector(group)))
    note = f"published {row.published_orbit_size}" if row.published_orbit_size is not None else ""
    rows.append(_row(row.label, "|O|", size, row.orbit_size, note))

    degrees, numerator_coeffs, source = list(row.degrees), list(row.sym2_numerator), TABLE_SOURCE
    try:
        hist = provider(group)
    except BudgetExceeded as e:
        reason = f"{e}"
        for quantity, expected in (("order", row.order), ("degrees", list(row.degrees)),
                                   ("numerator", format_polynomial(list(row.sym2_numerator)))):
            rows.append(TableRow(row.label, quantity, "", str(expected), SKIPPED, reason))
    except CacheError as e:
        logger.error(f"{row.label}: {e}")
        rows.append(TableRow(row.label, "cache", type(e).__name__, "valid entry", MISMATCH, str(e)))
        return rows
    else:
        invariant_series = covariant_series(hist, CovariantClass.TRIVIAL, config.degree_truncation_order)
        degrees = recover_degrees(invariant_series, group.rank)
        result = numerator(hist, CovariantClass.SYM2, degrees, config.truncation_order)
        numerator_coeffs, source = result.numerator_coefficients(), provider.last_source
        rows.append(_row(row.label, "order", hist.total, row.order, source))
        rows.append(_row(row.label, "degrees", degrees, list(row.degrees), source))
        rows.append(_row(row.label, "numerator", format_polynomial(numerator_coeffs),
                         format_polynomial(list(row.sym2_numerator)), source))

    choices = len(enumerate_candidate_sets(degrees, numerator_coeffs))
    note = "from reference degrees and numerator" if source == TABLE_SOURCE else ""
    rows.append(_row(row.label, "choices", choices, row.choices, note))
    return rows


def cmd_tables(config: RunConfig, display: UIDisplay) -> int:
    provider = make_provider(config)
    rows: List[TableRow] = []
    for label in config.groups:
        rows.extend(table_rows(label, config, provider))
    if config.output_path:
        _write_json([r.to_dict() for r in rows], config.output_path)
    display.print(display.render_tables(rows))
    return EXIT_FAIL if any(r.status == MISMATCH for r in rows) else EXIT_OK


def cmd_molien(config: RunConfig, display: UIDisplay) -> int:
    label = config.groups[0]
    group = build_group(catalog(label))
    hist = make_provider(config)(group)
    degrees = recover_degrees(covariant_series(hist, CovariantClass.TRIVIAL, config.degree_truncation_order),
                              group.rank)
    cls = CovariantClass(config.covariant_class)
    result = numerator(hist, cls, degrees, config.truncation_order)
    if config.output_path:
        _write_json({
            'label': group.label,
            'class': cls.value,
            'order': str(hist.total),
            'degrees': degrees,
            'numerator': result.numerator_coefficients(),
            'series': [c.serialize() for c in result.series.coeffs],
            'source': result.source,
        }, config.output_path)
    display.print(display.render_series(result, group.label))
    return EXIT_OK


def cmd_orbit(config: RunConfig, display: UIDisplay) -> int:
    group = build_group(catalog(config.groups[0]))
    covectors = orbit(group, fundamental_covector(group))
    payload = covectors.to_json()
    if config.output_path:
        _write_json(payload, config.output_path)
    else:
        display.console.print_json(json.dumps(payload))
    return EXIT_OK


COMMANDS = {
    'certify': cmd_certify,
    'tables': cmd_tables,
    'molien': cmd_molien,
    'orbit': cmd_orbit,
}


def _run_context(args: argparse.Namespace) -> str:
    labels = getattr(args, 'groups', None) or [getattr(args, 'group', '')]
    return " ".join([args.command] + [label for label in labels if label])


def _record_error(args: argparse.Namespace, config: Optional[RunConfig], error: Exception) -> None:
    log_dir = config.log_dir if config is not None else (args.log_dir or RunConfig.log_dir)
    get_logger(log_dir).log_error(error, _run_context(args))


def main(argv: Optional[List[str]] = None, display: Optional[UIDisplay] = None) -> int:
    """Parse arguments, run one command, and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    display = display or UIDisplay()
    config: Optional[RunConfig] = None

    try:
        config = build_config(args)
        defaults = config.get_applied_defaults()
        if defaults:
            logger.info("Applied default configuration values:")
            for default in defaults:
                logger.info(f"  - {default}")
        run_log = get_logger(config.log_dir)
        run_log.log_system_event(f"{_run_context(args)} started")
        code = COMMANDS[config.command](config, display)
        run_log.log_system_event(f"{_run_context(args)} finished with exit code {code}")
        return code

    except BudgetExceeded as e:
        _record_error(args, config, e)
        if config is not None and config.enumeration_mode == "bfs":
            hint = "Raise --bfs-budget or use --mode chain"
        else:
            hint = "Use --long or --numerator paper-table"
        display.show_notification(f"{e}. {hint}", "ERROR")
        return EXIT_INPUT

    except (CoxhessError, ValueError) as e:
        logger.error(f"Input error: {e}")
        _record_error(args, config, e)
        display.show_notification(f"{type(e).__name__}: {e}", "ERROR")
        return EXIT_INPUT

    except KeyboardInterrupt:
        if config is not None:
            get_logger(config.log_dir).log_system_event(f"{_run_context(args)} interrupted", "WARNING")
        display.show_notification("Interrupted; completed blocks are checkpointed", "WARNING")
        return EXIT_FAIL
