"""CSV results files and SVG figures."""
from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import Sequence

from .harness import ExperimentConfig, ExperimentReport, PointReport

COLUMNS = ("experiment_id", "policy", "alpha", "run_index", "volatility", "mean_attendance",
           "avg_utility", "qoe_prob", "seed", "warmup", "K", "mu", "T_deadline")
NUMERIC = ("volatility", "mean_attendance", "avg_utility", "qoe_prob", "mu", "T_deadline")


def fmt(x: float) -> str:
    return f"{x:.6g}"


@dataclass
class OutputRow:
    experiment_id: str
    policy: str
    alpha: str
    run_index: str
    volatility: str
    mean_attendance: str
    avg_utility: str
    qoe_prob: str
    seed: str
    warmup: str
    K: str
    mu: str
    T_deadline: str


def experiment_id(point: PointReport) -> str:
    if point.flat:
        return f"{point.name}-flat"
    if point.s is not None:
        return f"{point.name}-s{point.s}"
    return point.name


def point_rows(point: PointReport, config: ExperimentConfig) -> list[OutputRow]:
    task = config.task
    common = dict(experiment_id=experiment_id(point), policy=point.policy,
                  alpha="na" if point.alpha is None else fmt(point.alpha),
                  warmup=str(config.warmup), K=str(task.tasks_per_round),
                  mu=fmt(task.mean_task_time), T_deadline=fmt(task.deadline))
    rows = [OutputRow(run_index=str(r.run_index), volatility=fmt(r.volatility),
                      mean_attendance=fmt(r.mean_attendance), avg_utility=fmt(r.mean_utility),
                      qoe_prob=fmt(r.qoe_probability), seed=str(r.seed), **common)
            for r in point.runs]
    rows.append(OutputRow(run_index="agg", volatility=fmt(point.mean("volatility")),
                          mean_attendance=fmt(point.mean("mean_attendance")),
                          avg_utility=fmt(point.mean("mean_utility")),
                          qoe_prob=fmt(point.mean("qoe_probability")),
                          seed=str(config.root_seed), **common))
    return rows


def metadata_lines(command: str, config: ExperimentConfig, policies: Sequence[str]) -> list[str]:
    """Effective configuration as ``key=value`` pairs (execution-only settings excluded)."""
    g, t = config.game, config.task
    sweep = "none" if config.sweep is None else ",".join(map(str, config.sweep))
    pairs = [("command", command), ("agents", g.num_agents), ("cutoff", g.cutoff),
             ("rounds", g.num_rounds), ("reward", fmt(g.reward)), ("runs", config.runs),
             ("seed", config.root_seed), ("sweep_s", sweep), ("warmup", config.warmup),
             ("tasks_per_round", t.tasks_per_round), ("mean_task_time", fmt(t.mean_task_time)),
             ("deadline", fmt(t.deadline)), ("task_distribution", t.distribution)]
    pairs += [("policy", p) for p in policies]
    return [f"{k}={v}" for k, v in pairs]


def render_csv(command: str, reports: Sequence[ExperimentReport]) -> str:
    buf = io.StringIO()
    base = reports[0].config
    for line in metadata_lines(command, base, [str(r.config.policy) for r in reports]):
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for report in reports:
        for point in report.points:
            writer.writerows(astuple(row) for row in point_rows(point, report.config))
    return buf.getvalue()


def write_csv(path: Path, command: str, reports: Sequence[ExperimentReport]) -> Path:
    path = Path(path)
    path.write_text(render_csv(command, reports))
    return path


def read_results(path: Path) -> tuple[dict[str, list[str]], list[dict[str, object]]]:
    """Parse a results file into (metadata, rows); numeric columns become floats."""
    meta: dict[str, list[str]] = {}
    body = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta.setdefault(key, []).append(value)
        else:
            body.append(line)
    rows = []
    for rec in csv.DictReader(body):
        for key in NUMERIC:
            rec[key] = float(rec[key])
        rows.append(rec)
    return meta, rows


# Figures --------------------------------------------------------------------

def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "mg-edge-lab"
    plt.rcParams["svg.fonttype"] = "path"
    return plt


def _save(fig, path: Path, description: str) -> Path:
    fig.savefig(path, format="svg", bbox_inches="tight",
                metadata={"Date": None, "Description": description})
    return path


def plot_volatility(reports: Sequence[ExperimentReport], path: Path, description: str) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for report in reports:
        curve = report.curve("volatility")
        if not curve:
            continue
        xs = sorted(curve)
        ys = [curve[x][0] for x in xs]
        err = [curve[x][1] for x in xs]
        style = "--" if report.points[0].flat else "-o"
        ax.errorbar(xs, ys, yerr=err, fmt=style, ms=4, capsize=2, label=report.config.policy.name)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel(r"$\alpha = 2^s / M$")
    ax.set_ylabel(r"volatility $\sigma^2 / M$")
    ax.legend(fontsize=7, ncol=2)
    _save(fig, path, description)
    plt.close(fig)
    return path


def plot_by_policy(reports: Sequence[ExperimentReport], metric: str, label: str,
                   path: Path, description: str) -> Path:
    """Bar chart of ``metric`` at each policy's lowest-volatility point."""
    plt = _pyplot()
    best = [r.best("volatility") for r in reports]
    names = [r.config.policy.name for r in reports]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(best)), [p.mean(metric) for p in best],
           yerr=[p.se(metric) for p in best], capsize=2, color="tab:blue")
    ax.set_xticks(range(len(best)), names, rotation=40, ha="right", fontsize=8)
    ax.set_ylabel(label)
    _save(fig, path, description)
    plt.close(fig)
    return path


def write_plots(out_dir: Path, reports: Sequence[ExperimentReport], description: str) -> list[Path]:
    out_dir = Path(out_dir)
    if any(r.curve() for r in reports):
        volatility_plot = plot_volatility(reports, out_dir / "volatility_vs_alpha.svg", description)
    else:
        volatility_plot = plot_by_policy(reports, "volatility", r"volatility $\sigma^2 / M$",
                                         out_dir / "volatility_by_policy.svg", description)
    return [
        volatility_plot,
        plot_by_policy(reports, "mean_utility", "mean utility per server",
                       out_dir / "utility_by_policy.svg", description),
        plot_by_policy(reports, "qoe_probability", r"$\Pr[\tau \leq T]$",
                       out_dir / "qoe_by_policy.svg", description),
    ]

