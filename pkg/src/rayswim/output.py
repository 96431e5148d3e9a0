"""Result files. Every file carries the config hash and package version, and
is a pure function of them: no timestamps, fixed float formatting, fixed
SVG ids."""

import json
import logging
import os

import matplotlib
from matplotlib.figure import Figure

from .exceptions import ConfigError

logger = logging.getLogger(__name__)


def provenance(config):
    from . import __version__

    return {"config_sha256": config.sha256, "version": __version__}


def _header(config):
    return " ".join(f"{key}={value}" for key, value in provenance(config).items())


def ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError("output.dir", f"cannot create {path}: {exc.strerror}")
    return path


def _open(path):
    try:
        return open(path, "w", newline="\n", encoding="utf-8")
    except OSError as exc:
        raise ConfigError("output.dir", f"cannot write {path}: {exc.strerror}")


def write_csv(path, frame, config):
    """`frame` as CSV under a `# config_sha256=... version=...` line."""

    with _open(path) as f:
        f.write(f"# {_header(config)}\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    logger.info("wrote %s (%d rows)", path, len(frame))
    return path


def write_json(path, payload, config):
    document = {"provenance": provenance(config), **payload}
    with _open(path) as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info("wrote %s", path)
    return path


def write_svg(path, figure, config):
    """Save a matplotlib figure as a self-contained, reproducible SVG."""

    with matplotlib.rc_context({"svg.hashsalt": config.sha256, "svg.fonttype": "path"}):
        with _open(path) as f:
            figure.savefig(
                f,
                format="svg",
                metadata={"Date": None, "Description": _header(config)},
            )
    logger.info("wrote %s", path)
    return path


def trajectory_figure(runs, target=None, title=""):
    """Top view of one or more runs. `runs` maps label to TrajectoryRecord."""

    figure = Figure(figsize=(5, 5))
    ax = figure.add_subplot()
    if target is not None:
        ax.plot(target[:, 0], target[:, 1], "k--", lw=1, label="target")
    for label, record in runs.items():
        ax.plot(record.x, record.y, lw=1.5, label=label)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    ax.set_title(title)
    ax.legend(loc="best")
    return figure


def speed_map_figure(frame):
    figure = Figure(figsize=(6, 4))
    ax = figure.add_subplot()
    for b, rows in frame.groupby("b_mT", sort=True):
        ax.plot(rows["f_Hz"], rows["speed_mm_s"], marker="o", label=f"{b:g} mT")
    ax.set_xlabel("frequency (Hz)")
    ax.set_ylabel("speed (mm/s)")
    ax.legend(title="B", loc="best")
    return figure


def sensitivity_figure(frame):
    figure = Figure(figsize=(6, 4))
    ax = figure.add_subplot()
    width = 0.4
    for offset, (group, rows) in zip((-width / 2, width / 2), frame.groupby("group")):
        ax.bar(rows["step"] + offset, rows["delta_pct"], width, label=group)
    ax.set_xlabel("step")
    ax.set_ylabel("speed change (%)")
    ax.legend(loc="best")
    return figure
