"""CSV / JSON / NPZ writers for fringe curves, reports and Wigner grids."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .phasespace import WignerGrid
from .signal import FringeCurve

FRINGE_COLUMNS = ("theta", "tau_ns", "n2", "err_estimate", "method")


def _fmt(x: float) -> str:
    return repr(float(x))


def write_fringe_csv(curve: FringeCurve, path) -> Path:
    """One row per angle; ``err_estimate`` is blank for closed-form methods."""
    path = Path(path)
    errors = curve.errors if curve.errors is not None else [None] * len(curve)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FRINGE_COLUMNS)
        for theta, tau, n2, err in zip(curve.thetas, curve.tau_ns, curve.n2, errors):
            writer.writerow([_fmt(theta), _fmt(tau), _fmt(n2), "" if err is None else _fmt(err), curve.method])
    return path


def read_fringe_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open() as fh:
        rows = list(csv.DictReader(fh))
    out = {c: np.array([float(r[c]) if r[c] != "" else math.nan for r in rows]) for c in FRINGE_COLUMNS[:4]}
    out["method"] = np.array([r["method"] for r in rows])
    return out


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no inf/nan; keep them readable and round-trippable as strings
        return x if math.isfinite(x) else str(x)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def save_wigner_npz(grid: WignerGrid, path) -> Path:
    path = Path(path)
    np.savez(path, q=grid.q, p=grid.p, W=grid.W, kind=np.array(grid.kind),
             imag_residual=grid.imag_residual, mass_defect=grid.mass_defect)
    return path


def load_wigner_npz(path) -> WignerGrid:
    with np.load(path) as data:
        return WignerGrid(data["q"], data["p"], data["W"], str(data["kind"]),
                          imag_residual=float(data["imag_residual"]), mass_defect=float(data["mass_defect"]))


def save_wigner_csv(grid: WignerGrid, path) -> Path:
    """Two header lines describing the axes, then one row of W per q node."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"# optokick wigner grid kind={grid.kind}\n")
        fh.write(f"# q_min={_fmt(grid.q[0])} q_max={_fmt(grid.q[-1])} nq={len(grid.q)} "
                 f"p_min={_fmt(grid.p[0])} p_max={_fmt(grid.p[-1])} np={len(grid.p)}\n")
        for row in grid.W:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def load_wigner_csv(path) -> WignerGrid:
    with Path(path).open() as fh:
        first = fh.readline()
        axes = dict(item.split("=") for item in fh.readline().lstrip("# ").split())
        W = np.loadtxt(fh, delimiter=",", ndmin=2)
    kind = first.strip().split("kind=")[-1]
    q = np.linspace(float(axes["q_min"]), float(axes["q_max"]), int(axes["nq"]))
    p = np.linspace(float(axes["p_min"]), float(axes["p_max"]), int(axes["np"]))
    return WignerGrid(q, p, W, kind)
