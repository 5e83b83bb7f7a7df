# -*- coding: utf-8 -*-
"""

Create reports for airsec runs: the text summary, the sweep workbook and the
standalone plot script.

"""

import logging
import math
import string
from importlib import resources

from openpyxl import Workbook
from openpyxl.styles import Font

from .config import Config
from .geometry import Vec3, lemma1_limits, plate_extent

logger = logging.getLogger(__name__)

# shown for quantities that a command did not produce
DEFAULT_TEXT = '-'


class Report(object):
    """ A simple template engine. For example, a
    report text block may be "Trials: {trials} Mean: {mean}" and the data
    may be {'trials': '200', 'mean': '1.25'}
    The fields in the text block are filled in using the data, resulting in
    the string "Trials: 200 Mean: 1.25"
    This is similar to Python text formatting, but it has a simple conditional
    formatting feature: if all the data for a given block are default, an
    empty block will be returned. The purpose is to easily generate reports
    where sections that a command did not compute are not printed at all.
    """

    def __init__(self, data, fields_default=None):
        """ Init report with data dict. Fields whose value is DEFAULT_TEXT
        count as default unless fields_default is given. """
        self.text = ''
        self.data = {key: _as_text(val) for key, val in data.items()}
        if fields_default is None:
            fields_default = [key for key, val in self.data.items()
                              if val == DEFAULT_TEXT]
        self.fields_default = fields_default

    def __add__(self, s):
        """ Format and add a text block to report """
        self.text += self._cond_format(s, self.data)
        return self

    def __repr__(self):
        return self.text

    def _cond_format(self, s, data):
        """ Conditionally format string s. Fields given as {variable} are
        formatted using the data. If all fields are default, an
        empty string is returned. """
        flds = list(Report._get_fields(s))
        if not flds or any(fld not in self.fields_default for fld in flds):
            return s.format(**data)
        else:
            return ''

    @staticmethod
    def _get_fields(s):
        """Yield fields from a format string, e.g.
        '{foo} is {bar}'  ->  ['foo', 'bar']  """
        fi = string.Formatter()
        for items in fi.parse(s):
            if items[1]:
                yield items[1]

    def make_report(self, template=Config.summary_template):
        """Create report using the template, a path relative to the package.
        The template code modifies a variable called report, which cannot
        be a function local, so a separate dict holds the namespace. """
        source = resources.files(__package__).joinpath(template).read_text(
            encoding='utf-8')
        report = self  # the Report instance to modify
        ldict = locals()
        exec(compile(source, template, 'exec'), ldict, ldict)
        return ldict['report'].text


def _as_text(val):
    if val is None:
        return DEFAULT_TEXT
    if isinstance(val, float):
        return DEFAULT_TEXT if math.isnan(val) else '%.6g' % val
    return str(val)


def summary_data(command, config, aggregate=None, trajectory=None,
                 baseline=None, sweep=None, checks=None):
    """Collect the summary fields of a finished command.

    Anything a command did not compute stays at DEFAULT_TEXT, so the
    corresponding template blocks drop out.
    """
    data = dict.fromkeys((
        'trials', 'mean', 'mean_raw', 'ci_low', 'ci_high', 'rate_bob',
        'rate_eve', 'hover_x', 'hover_y', 'hover_z', 'hover_eve', 'max_step',
        'fixed_mean', 'fixed_gain', 'sweep_param', 'sweep_values',
        'sweep_best', 'lemma1_kx', 'lemma1_ky', 'lemma1_limit',
        'checks_passed', 'checks_total'), None)
    plate = plate_extent(config.grid)
    data.update(command=command, scenario=config.summary(),
                scheme=config.scheme, seed=config.seed,
                samples=config.samples, k=config.k, m=config.m,
                plate_width=plate.width_wavelengths,
                plate_area=plate.area_wavelengths2)
    if trajectory is None and aggregate is not None:
        trajectory = aggregate.trajectory
    if trajectory is not None:
        hover = trajectory.points[-min(50, trajectory.samples):].mean(axis=0)
        data.update(hover_x=hover[0], hover_y=hover[1], hover_z=hover[2],
                    hover_eve=(Vec3.from_array(hover) - config.omega_e).norm(),
                    max_step=trajectory.max_step())
    if aggregate is not None:
        data.update(trials=aggregate.trials, mean=aggregate.mean,
                    mean_raw=aggregate.mean_raw,
                    rate_bob=aggregate.mean_rate_bob,
                    rate_eve=aggregate.mean_rate_eve)
        # the interval is only reported when it means something
        if aggregate.trials >= 2:
            data.update(ci_low=aggregate.ci_low, ci_high=aggregate.ci_high)
    if baseline is not None and aggregate is not None:
        data.update(fixed_mean=baseline.mean,
                    fixed_gain=aggregate.mean - baseline.mean)
    if sweep is not None:
        means = [agg.mean for agg in sweep.aggregates]
        best = sweep.values[means.index(max(means))]
        data.update(sweep_param=sweep.parameter,
                    sweep_values=', '.join('%g' % v for v in sweep.values),
                    sweep_best=best)
    limits = lemma1_limits(config.grid)
    if not limits.feasible:
        data.update(lemma1_kx=limits.kx_max, lemma1_ky=limits.ky_max,
                    lemma1_limit=limits.kx_max * limits.ky_max)
    if checks is not None:
        data.update(checks_passed=sum(c.passed for c in checks),
                    checks_total=len(checks))
    return data


def make_summary(command, config, **results):
    """Summary text for a finished command"""
    return Report(summary_data(command, config, **results)).make_report()


def make_workbook(frame, title='sweep'):
    """Workbook with one sheet: header row, then one row per frame row"""
    wb = Workbook()
    ws = wb.active
    ws.title = title
    ws.append(list(frame.columns))
    for cell in ws[1]:
        cell.font = Font(bold=True)
    for row in frame.itertuples(index=False):
        ws.append([_cell_value(val) for val in row])
    ws.freeze_panes = 'A2'
    return wb


def _cell_value(val):
    if hasattr(val, 'item'):
        val = val.item()
    if isinstance(val, float) and math.isnan(val):
        return None
    return val


PLOT_SCRIPT = '''# -*- coding: utf-8 -*-
"""
Plot the CSV outputs of an airsec run found next to this script.

Written by airsec. Needs pandas and matplotlib.
"""

from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

HERE = Path(__file__).resolve().parent


def plot_rates(ax, fn):
    df = pd.read_csv(fn)
    ax.plot(df['n'], df['rate_clamped'], label='secrecy rate')
    ax.plot(df['n'], df['rate_raw'], ':', label='raw difference')
    ax.set_xlabel('sample n')
    ax.set_ylabel('bits/s/Hz')
    ax.legend()


def plot_trajectory(ax, fn):
    df = pd.read_csv(fn)
    ax.plot(df['x'], df['y'], '.-', markersize=2)
    ax.plot(df['x'].iloc[-1], df['y'].iloc[-1], 'r*', markersize=10)
    ax.set_xlabel('x (m)')
    ax.set_ylabel('y (m)')
    ax.set_aspect('equal', adjustable='datalim')


def plot_sweep(ax, fn):
    df = pd.read_csv(fn)
    err = [df['mean'] - df['ci_low'], df['ci_high'] - df['mean']]
    ax.errorbar(df['param_value'], df['mean'], yerr=err, fmt='o-',
                capsize=3)
    ax.set_xlabel('parameter value')
    ax.set_ylabel('mean secrecy rate (bits/s/Hz)')


def main():
    plotters = [(plot_rates, {rates!r}), (plot_trajectory, {trajectory!r}),
                (plot_sweep, {sweep!r})]
    found = [(fun, HERE / name) for fun, name in plotters
             if (HERE / name).is_file()]
    if not found:
        print('no airsec CSV files in %s' % HERE)
        return
    fig, axes = plt.subplots(1, len(found), figsize=(5 * len(found), 4),
                             squeeze=False)
    for ax, (fun, fn) in zip(axes[0], found):
        fun(ax, fn)
        ax.set_title(fn.name)
    fig.tight_layout()
    fig.savefig(HERE / 'plot_results.png', dpi=150)
    plt.show()


if __name__ == '__main__':
    main()
'''


def plot_script():
    """Source of the standalone plot script for the output directory"""
    return PLOT_SCRIPT.format(rates=Config.rates_file,
                              trajectory=Config.trajectory_file,
                              sweep=Config.sweep_file)
