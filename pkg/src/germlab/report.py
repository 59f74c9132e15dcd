"""Run manifests, verdict reports and series files.

Reports are rendered with sorted keys and shortest-repr floats so equal
inputs give equal bytes.  Wall time lives only in the separate manifest
file, which is why the report itself can be byte-identical across runs.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and non-finite floats into JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int
    fingerprints: dict
    version: str = __version__
    wall_time: float = 0.0

    def to_dict(self, timing=True):
        d = {"command": self.command, "params": self.params, "seed": self.seed,
             "germ_fingerprints": self.fingerprints, "version": self.version}
        if timing:
            d["wall_time_s"] = self.wall_time
        return d


@dataclass
class VerdictReport:
    lemma: str
    inputs: dict
    measured: dict
    thresholds: dict = field(default_factory=dict)
    verdict: str = "complete"  # pass | fail | inconclusive | complete
    necessary_condition_only: bool | None = None

    def to_dict(self):
        d = {"lemma": self.lemma, "inputs": self.inputs, "measured": self.measured,
             "thresholds": self.thresholds, "verdict": self.verdict}
        if self.necessary_condition_only is not None:
            d["necessary_condition_only"] = self.necessary_condition_only
        return d


EXIT_CODES = {"pass": 0, "complete": 0, "fail": 2, "inconclusive": 3}


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def emit_series(path, columns, rows):
    """Write a CSV with a header row; floats use 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_outputs(out, manifest: RunManifest, report: VerdictReport, series=None, fmt="json", quiet=False):
    """Write ``<command>.json`` (manifest without timing + report), series CSVs and the manifest.

    Without ``out`` the report goes to stdout, or the series with ``fmt="csv"``.
    """
    series = series or {}
    body = {"manifest": manifest.to_dict(timing=False), "report": report.to_dict()}
    tag = manifest.command.replace(" ", "-")
    if out is None:
        if quiet:
            return
        if fmt == "csv" and series:
            for name, (cols, rows) in series.items():
                w = csv.writer(sys.stdout, lineterminator="\n")
                w.writerow(cols)
                for row in rows:
                    w.writerow([_fmt(v) for v in row])
        else:
            sys.stdout.write(dumps(body))
        return
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{tag}.json").write_text(dumps(body))
    for name, (cols, rows) in series.items():
        emit_series(out / f"{tag}_{name}.csv", cols, rows)
    (out / f"{tag}.manifest.json").write_text(dumps(manifest.to_dict(timing=True)))
