"""JSON/CSV serialization of suite results."""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from fractions import Fraction
from importlib import resources
from typing import Dict

import numpy as np
import scipy

from . import __version__
from .algebra import GaussianRational, MultiPoly
from .dynamics import IntegralValues, Trajectory
from .pencil import PencilSpec
from .suites import SuiteResult

SCHEMA_VERSION = 1
VERDICTS = ("pass", "fail", "skip", "degenerate")


def jsonable(obj):
    """Rationals as ``"p/q"``, complex values as ``[re, im]``, non-finite floats as strings."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, GaussianRational):
        return [jsonable(obj.re), jsonable(obj.im)]
    if isinstance(obj, (MultiPoly, PencilSpec)):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    return str(obj)


def versions() -> Dict[str, str]:
    return {"geokow": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__}


def build_report(command: str, config: Dict[str, object], result: SuiteResult, wall_time: float) -> Dict:
    counts = {v: sum(c.verdict == v for c in result.checks) for v in VERDICTS}
    data = {k: v for k, v in result.data.items() if not isinstance(v, Trajectory)}
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": jsonable(config),
        "checks": [{"name": c.name, "verdict": c.verdict, "residual": jsonable(c.residual),
                    "detail": jsonable(c.detail)} for c in result.checks],
        "summary": {**counts, "ok": counts["fail"] == 0},
        "notes": list(result.notes),
        "data": jsonable(data),
        "versions": versions(),
        "wall_time": wall_time,
    }


def dumps(report: Dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_schema() -> Dict:
    text = resources.files("geokow").joinpath("schema/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


STATE_NAMES = ("e1", "e2", "x1", "x2", "r", "g")


def trajectory_csv(traj: Trajectory) -> str:
    """Header ``t,e1_re,e1_im,...,g_im,drift_k2,drift_2,drift_3,drift_4``."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    head = ["t"] + [f"{n}_{p}" for n in STATE_NAMES for p in ("re", "im")]
    head += [f"drift_{n}" for n in IntegralValues.NAMES]
    w.writerow(head)
    I0 = traj.integrals[0]
    for t, y, I in zip(traj.t, traj.states, traj.integrals):
        row = [repr(float(t))]
        for v in y:
            row += [repr(float(v.real)), repr(float(v.imag))]
        row += [repr(float(abs(a - b) / max(1.0, abs(b)))) for a, b in zip(I, I0)]
        w.writerow(row)
    return out.getvalue()


def checks_csv(report: Dict) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["name", "verdict", "residual"])
    for c in report["checks"]:
        w.writerow([c["name"], c["verdict"], "" if c["residual"] is None else c["residual"]])
    return out.getvalue()
