"""
SVG charts and flat CSV export for experiment reports.
"""

import logging
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from ..exceptions import DomainError  # noqa: E402
from .models import ExperimentKind, ExperimentReport  # noqa: E402

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def write_replicates_csv(report: ExperimentReport, path: PathLike) -> None:
    """Per-replication statistics, one row each, for external plotting."""
    if not report.replicates:
        raise DomainError(f"a {report.kind.value} report has no per-replication statistics")
    pd.DataFrame(report.replicates).to_csv(path, index=False, encoding="utf-8", float_format="%.17g")


def _trend(ax, report: ExperimentReport) -> None:
    ms = [row.m for row in report.trend]
    depth = np.array([row.depth for row in report.trend])
    se = np.array([row.standard_error for row in report.trend])
    ax.errorbar(ms, depth, yerr=3 * se, marker="o", capsize=3, label="empirical depth")
    exact = [row.exact for row in report.trend]
    if all(e is not None for e in exact):
        ax.plot(ms, exact, "k--", label="C(2m,m)/4^m")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("grid resolution m")
    ax.set_ylabel("depth of h")


def _errors(ax, report: ExperimentReport) -> None:
    ns = [row.n for row in report.rows]
    ax.plot(ns, [row.sup_error for row in report.rows], marker="o", label="median")
    ax.plot(ns, [row.q95 for row in report.rows], marker="s", ls=":", label=f"q95 of {report.rows[0].statistic}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("sup error")


def _tail(ax, report: ExperimentReport) -> None:
    pts = [(t.r**2, np.log(t.exceedance)) for t in report.tail if t.exceedance > 0]
    if pts:
        x, y = zip(*pts)
        ax.plot(x, y, "o", label="log P(S >= r)")
    if report.fitted_alpha is not None:
        xs = np.array([p[0] for p in pts])
        intercept = float(np.mean([p[1] for p in pts]) + report.fitted_alpha * xs.mean())
        ax.plot(xs, intercept - report.fitted_alpha * xs, "k--", label=f"alpha={report.fitted_alpha:.3g}")
    ax.set_xlabel("r^2")
    ax.set_ylabel("log exceedance")


def _limit_law(ax, report: ExperimentReport) -> None:
    deviations = [d["deviation"] for d in report.replicates]
    ax.hist(deviations, bins=40, density=True, alpha=0.6, label="sqrt(n)(D_n - D)")
    ax.axvline(report.limit_law.predicted_mean, color="k", ls="--", label="predicted mean")
    ax.set_xlabel("normalized deviation")


def _norm_tail(ax, report: ExperimentReport) -> None:
    rs = [row.r for row in report.norm_tail]
    ax.plot(rs, [row.max_depth for row in report.norm_tail], marker="o", label="max depth")
    ax.plot(rs, [row.bound for row in report.norm_tail], "k--", label="2 P_n(||X|| >= r)")
    ax.set_xlabel("||h||")
    ax.set_ylabel("depth")


_PANELS = {
    ExperimentKind.ZERO_TREND: _trend,
    ExperimentKind.CONSISTENCY: _errors,
    ExperimentKind.SUBSET: _errors,
    ExperimentKind.RATE: _tail,
    ExperimentKind.LIMIT_LAW: _limit_law,
    ExperimentKind.NORM_TAIL: _norm_tail,
}


def plot_report(report: ExperimentReport, path: PathLike) -> None:
    """Write the chart for a report as SVG."""
    panel = _PANELS.get(report.kind)
    if panel is None:
        raise DomainError(f"no chart for {report.kind.value} reports")
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        panel(ax, report)
        ax.set_title(f"{report.kind.value} (seed {report.seed})")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg")
    finally:
        plt.close(fig)
    logger.debug("wrote %s chart to %s", report.kind.value, path)
