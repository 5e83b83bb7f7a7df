# -*- coding: utf-8 -*-
"""
Command line front end for airsec.

    airsec run [--config FILE] [--seed S] [--trials N] [--scheme 1|2|fixed]
    airsec sweep --param T --values 100,200,300
    airsec trajectory
    airsec validate [--quick]

Every command writes into the output directory (--out) and records the
resolved scenario in manifest.json; passing that manifest back through
--config replays the scenario. Exit status is 0 on success, 1 when a
validation suite fails and 2 on configuration or I/O errors.
"""

import argparse
import json
import logging
import sys
import traceback
from datetime import datetime
from pathlib import Path

from . import __version__, msgs
from .checks import run_checks
from .config import Config, parse_config
from .errors import AirsecError, ConfigError
from .reporter import make_summary, make_workbook, plot_script
from .sim import Scenario, monte_carlo, sweep

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s | %(name)s | %(levelname)s | %(message)s'


def _overrides(args):
    """Config keys set on the command line"""
    over = {}
    for item in args.set or ():
        key, sep, val = item.partition('=')
        if not sep or not key.strip():
            raise ConfigError('set', msgs.bad_override.format(value=item))
        over[key.strip()] = val.strip()
    for key in ('seed', 'trials', 'scheme'):
        if getattr(args, key, None) is not None:
            over[key] = str(getattr(args, key))
    return over


def _values(text):
    try:
        values = [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ConfigError('values', msgs.bad_values.format(value=text))
    if not values:
        raise ConfigError('values', msgs.no_values)
    return values


def _write_text(path, text):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    logger.info(msgs.wrote_file.format(filename=path))


def _write_frame(frame, path):
    frame.to_csv(path, index=False, float_format=Config.csv_float_format)
    logger.info(msgs.wrote_file.format(filename=path))


def _write_manifest(out, args, argv, config, **extra):
    manifest = {
        'scenario': config.to_dict(),
        'command': args.command,
        'argv': list(argv),
        'seed': config.seed,
        'output_dir': str(out),
        'version': __version__,
        'timestamp': datetime.now().isoformat(timespec='seconds'),
    }
    manifest.update(extra)
    _write_text(out / Config.manifest_file,
                json.dumps(manifest, ensure_ascii=False, indent=True,
                           sort_keys=True))


def _finish(out, args, argv, config, summary, **extra):
    """Outputs shared by all commands"""
    _write_text(out / Config.summary_file, summary)
    _write_manifest(out, args, argv, config, **extra)
    if args.emit_plot:
        _write_text(out / Config.plot_script_file, plot_script())


def cmd_run(args, argv, config, out):
    agg = monte_carlo(config)
    _write_frame(agg.results[0].as_frame(), out / Config.rates_file)
    _write_frame(agg.trajectory.as_frame(), out / Config.trajectory_file)
    baseline = None
    if args.baseline and config.scheme != 'fixed':
        baseline = monte_carlo(config.replace(scheme='fixed'))
    summary = make_summary('run', config, aggregate=agg, baseline=baseline)
    logger.info(msgs.run_result.format(mean=agg.mean, low=agg.ci_low,
                                       high=agg.ci_high, trials=agg.trials))
    _finish(out, args, argv, config, summary)
    return 0


def cmd_sweep(args, argv, config, out):
    result = sweep(config, args.param, _values(args.values))
    _write_frame(result.as_frame(), out / Config.sweep_file)
    if args.xlsx:
        path = out / Config.sweep_xlsx_file
        make_workbook(result.as_detail_frame(), title=args.param).save(path)
        logger.info(msgs.wrote_file.format(filename=path))
    summary = make_summary('sweep', config, sweep=result)
    _finish(out, args, argv, config, summary,
            sweep={'param': args.param, 'values': list(result.values)})
    return 0


def cmd_trajectory(args, argv, config, out):
    traj = Scenario(config).plan()
    _write_frame(traj.as_frame(), out / Config.trajectory_file)
    summary = make_summary('trajectory', config, trajectory=traj)
    _finish(out, args, argv, config, summary)
    return 0


def cmd_validate(args, argv, config, out):
    results = run_checks(config, quick=args.quick)
    for result in results:
        print(result)
    passed = sum(r.passed for r in results)
    print(msgs.validate_summary.format(passed=passed, total=len(results)))
    summary = make_summary('validate', config, checks=results)
    _finish(out, args, argv, config, summary)
    return 0 if passed == len(results) else 1


def _common(parser):
    parser.add_argument('--config', type=Path,
                        help='key = value scenario file or run manifest')
    parser.add_argument('--set', action='append', metavar='KEY=VALUE',
                        help='override one config key (repeatable)')
    parser.add_argument('--seed', type=int, help='master seed')
    parser.add_argument('--trials', type=int, help='Monte-Carlo trials')
    parser.add_argument('--scheme', choices=Config.schemes,
                        help='beamforming scheme, or fixed IRS')
    parser.add_argument('--out', type=Path, default=Config.output_dir,
                        help='output directory (default: %(default)s)')
    parser.add_argument('--emit-plot', action='store_true',
                        help='also write a matplotlib script for the CSVs')
    parser.add_argument('--verbose', '-v', action='store_true',
                        help='debug logging')


def make_parser():
    parser = argparse.ArgumentParser(
        prog='airsec',
        description='Secrecy simulator for a UAV-carried reflecting surface')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    sub = parser.add_subparsers(dest='command', required=True)
    prun = sub.add_parser('run', help='Monte-Carlo run of one scenario')
    prun.add_argument('--baseline', action='store_true',
                      help='compare against the fixed-IRS deployment')
    psweep = sub.add_parser('sweep', help='sweep one parameter')
    psweep.add_argument('--param', required=True,
                        choices=Config.sweep_parameters)
    psweep.add_argument('--values', required=True,
                        help='comma separated values, e.g. 100,200,300')
    psweep.add_argument('--xlsx', action='store_true',
                        help='also write the sweep as an Excel workbook')
    sub.add_parser('trajectory', help='plan the flight only')
    pval = sub.add_parser('validate', help='run the invariant suites')
    pval.add_argument('--quick', action='store_true',
                      help='use a tenth of the random instances')
    for p in (prun, psweep, sub.choices['trajectory'], pval):
        _common(p)
    return parser


_COMMANDS = {'run': cmd_run, 'sweep': cmd_sweep,
             'trajectory': cmd_trajectory, 'validate': cmd_validate}


def _install_excepthook(out):
    def my_excepthook(type, value, tback):
        """ Custom exception handler for fatal (unhandled) exceptions:
        dump the traceback next to the outputs and terminate. """
        tb_full = ''.join(traceback.format_exception(type, value, tback))
        fn = Path(out) / Config.traceback_file
        # a failure here must not loop back into the hook
        try:
            fn.parent.mkdir(parents=True, exist_ok=True)
            with open(fn, 'w', encoding='utf-8') as f:
                f.write(tb_full)
            sys.stderr.write(msgs.unhandled_exception.format(filename=fn))
        except Exception:
            print('Cannot dump traceback!')
        sys.__excepthook__(type, value, tback)

    sys.excepthook = my_excepthook


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format=LOG_FORMAT)
    _install_excepthook(args.out)
    try:
        config = parse_config(args.config, _overrides(args))
        logger.info(config.summary())
        args.out.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](args, argv, config, args.out)
    except AirsecError as err:
        print(msgs.error_exit.format(err=err), file=sys.stderr)
    except Config.io_exceptions as err:
        print(msgs.error_exit.format(err=err), file=sys.stderr)
    return 2


if __name__ == '__main__':
    sys.exit(main())
