"""
    orientquadrics.extensions.plotting
    ----------------------------------

    Matplotlib plots of experiment results. Figures are written as SVG with a fixed hash salt and
    without date metadata so identical data produce identical files.
"""

import logging

import matplotlib as mpl
from matplotlib.figure import Figure

_LOGGER = logging.getLogger(__name__)
_LOGGER.addHandler(logging.NullHandler())

PLOT_PARAMS = {
    'svg.hashsalt': 'orientquadrics',
    'svg.fonttype': 'none',
    'font.size': 9,
    'font.family': 'sans-serif',
    'axes.grid': True,
    'grid.alpha': 0.4,
    'lines.linewidth': 1.5,
    'lines.markersize': 5,
}


def plot_sigma_sweep(sigmas, values, path, baseline=None, ylabel='mean ATE [m]', title=None, width=5.0):
    """ Log-x line plot of a metric over orientation factor sigmas.
    Args:
        sigmas (list): Orientation factor standard deviations, positive.
        values (list): Metric value per sigma.
        path (str): SVG output path.
        baseline (float): Optional value drawn as dashed horizontal line (e.g. the standalone result).
    """
    if len(sigmas) != len(values) or not sigmas:
        raise ValueError("Need one value per sigma.")
    order = sorted(range(len(sigmas)), key=lambda idx: sigmas[idx])
    xs = [float(sigmas[idx]) for idx in order]
    ys = [float(values[idx]) for idx in order]
    golden_ratio = (5 ** 0.5 - 1.0) / 2.0
    with mpl.rc_context(PLOT_PARAMS):
        fig = Figure(figsize=(width, width * golden_ratio))
        axes = fig.add_subplot(1, 1, 1)
        axes.plot(xs, ys, marker='o', color='tab:red', label='with orientation factors')
        if baseline is not None:
            axes.axhline(baseline, linestyle='--', color='tab:blue', label='without orientation factors')
        axes.set_xscale('log')
        if len(xs) == 1:
            axes.set_xlim(xs[0] / 10.0, xs[0] * 10.0)
        axes.set_xlabel('orientation factor sigma')
        axes.set_ylabel(ylabel)
        if title:
            axes.set_title(title)
        axes.legend(loc='best')
        fig.tight_layout()
        fig.savefig(path, format='svg', metadata={'Date': None})
    _LOGGER.info("Wrote sweep plot with %d points to %s", len(xs), path)
    return path
