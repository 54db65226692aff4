"""CSV/JSON artifact formats.

Curves travel as CSV with the header ``time_us,probability,stderr``; every
CSV artifact starts with ``#``-prefixed provenance lines (resolved config,
seed, generator) so it can be reproduced from its own header. Fit results
and density matrices travel as JSON; densities are row-major [re, im] pairs
in the (|1,+1>, |1,0>, |1,-1>) basis.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO

import numpy as np

from .dephasing import DecayCurve, TimeGrid
from .fitting import FitResult
from .tomography import MeasurementRecord

CURVE_HEADER = "time_us,probability,stderr"
RECORD_HEADER = "basis,shots,plus,minus,outside"


def _provenance_lines(provenance: dict | None) -> list[str]:
    lines = []
    for key, value in (provenance or {}).items():
        lines.append(f"# {key} = {json.dumps(value)}")
    return lines


def _parse_provenance(lines: list[str]) -> dict:
    out = {}
    for line in lines:
        body = line.lstrip("#").strip()
        key, sep, value = body.partition("=")
        if not sep:
            continue
        try:
            out[key.strip()] = json.loads(value.strip())
        except json.JSONDecodeError:
            out[key.strip()] = value.strip()
    return out


def curve_to_csv(curve: DecayCurve, provenance: dict | None = None) -> str:
    lines = _provenance_lines(provenance)
    lines.append(CURVE_HEADER)
    for t, p, s in zip(curve.grid.times, curve.probabilities, curve.stderr):
        lines.append(f"{t * 1e6:.6f},{p:.9e},{s:.9e}")
    return "\n".join(lines) + "\n"


def write_curve_csv(path: str | Path | IO[str], curve: DecayCurve,
                    provenance: dict | None = None) -> None:
    text = curve_to_csv(curve, provenance)
    if hasattr(path, "write"):
        path.write(text)
    else:
        Path(path).write_text(text)


def read_curve_csv(source: str | Path | IO[str]) -> tuple[DecayCurve, dict]:
    """Parse a curve CSV; returns the curve and its provenance header."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text()
    comments, rows = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line)
        else:
            rows.append(line)
    if not rows or rows[0] != CURVE_HEADER:
        raise ValueError(f"expected header {CURVE_HEADER!r}")
    data = np.array([[float(x) for x in row.split(",")] for row in rows[1:]])
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError("curve rows must have three columns")
    curve = DecayCurve(
        grid=TimeGrid(data[:, 0] * 1e-6),
        probabilities=np.clip(data[:, 1], 0.0, 1.0),
        stderr=data[:, 2],
        meta=_parse_provenance(comments),
    )
    return curve, curve.meta


def fit_result_to_dict(result: FitResult) -> dict:
    return {
        "family": result.family,
        "params": result.params,
        "stderr_1sigma": result.stderr,
        "free_params": list(result.param_names),
        "covariance": [[float(x) for x in row] for row in np.atleast_2d(result.covariance)],
        "residual_norm": result.residual_norm,
        "converged": result.converged,
        "iterations": result.iterations,
        "message": result.message,
        "derived": result.derived,
        "units": {"mean_bz": "T", "width_bz": "T", "width_bx": "T",
                  "circular_fraction": "1", "amplitude": "1", "offset": "1",
                  "t2_star_s": "s", "t1_like_s": "s"},
    }


def density_to_dict(rho: np.ndarray) -> dict:
    rho = np.asarray(rho)
    return {
        "basis": ["m=+1", "m=0", "m=-1"],
        "matrix_re_im": [[[float(z.real), float(z.imag)] for z in row] for row in rho],
    }


def density_from_dict(payload: dict) -> np.ndarray:
    data = payload["matrix_re_im"]
    return np.array([[complex(re, im) for re, im in row] for row in data])


def records_to_csv(records: list[MeasurementRecord],
                   provenance: dict | None = None) -> str:
    lines = _provenance_lines(provenance)
    lines.append(RECORD_HEADER)
    for r in records:
        lines.append(f"{r.basis},{r.shots},{r.count_plus},{r.count_minus},{r.count_outside}")
    return "\n".join(lines) + "\n"


def read_records_csv(source: str | Path | IO[str]) -> list[MeasurementRecord]:
    text = source.read() if hasattr(source, "read") else Path(source).read_text()
    rows = [ln.strip() for ln in text.splitlines()
            if ln.strip() and not ln.startswith("#")]
    if not rows or rows[0] != RECORD_HEADER:
        raise ValueError(f"expected header {RECORD_HEADER!r}")
    records = []
    for row in rows[1:]:
        basis, shots, plus, minus, outside = row.split(",")
        records.append(MeasurementRecord(basis=basis, shots=int(shots),
                                         count_plus=int(plus), count_minus=int(minus),
                                         count_outside=int(outside)))
    return records
