"""File formats: signal CSV, mask/model/report JSON.

Signal CSV: header `j,channel,re,im`, one row per (sample, channel),
j 1-based, channel 1-based, rows ordered channel-major within sample.
Mask JSON: array of 1-based sample indices plus the covered length.
Model JSON: freqs (K), amps (K x L), phases (K x L), is_ca.
All writers are deterministic: fixed float repr, no timestamps.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .descent import SolverReport
from .signals import MultichannelSignal, ProblemDims, SamplingMask, SpectralModel

__all__ = [
    "write_signal_csv",
    "read_signal_csv",
    "write_mask_json",
    "read_mask_json",
    "write_model_json",
    "read_model_json",
    "write_report_json",
    "write_freqs_json",
]


def write_signal_csv(path, data: np.ndarray) -> Path:
    """Persist an (N, L) complex array; accepts a MultichannelSignal too."""
    data = np.asarray(getattr(data, "data", data), dtype=complex)
    if data.ndim != 2:
        raise ValueError(f"expected an (N, L) array, got shape {data.shape}")
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "channel", "re", "im"])
        for j in range(data.shape[0]):
            for l in range(data.shape[1]):
                z = data[j, l]
                writer.writerow([j + 1, l + 1, repr(float(z.real)), repr(float(z.imag))])
    return path


def read_signal_csv(path) -> np.ndarray:
    """Read back an (N, L) complex array written by ``write_signal_csv``."""
    rows = []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["j", "channel", "re", "im"]:
            raise ValueError(f"{path}: expected header j,channel,re,im, got {header}")
        for line in reader:
            if not line:
                continue
            j, l, re, im = line
            rows.append((int(j), int(l), float(re), float(im)))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    N = max(r[0] for r in rows)
    L = max(r[1] for r in rows)
    data = np.full((N, L), np.nan, dtype=complex)
    for j, l, re, im in rows:
        if not (1 <= j <= N and 1 <= l <= L):
            raise ValueError(f"{path}: index ({j}, {l}) out of range")
        data[j - 1, l - 1] = re + 1j * im
    if np.isnan(data.real).any():
        raise ValueError(f"{path}: missing (sample, channel) rows")
    return data


def write_mask_json(path, mask: SamplingMask) -> Path:
    path = Path(path)
    payload = {"N": int(mask.N), "indices": [int(i) for i in mask.indices]}
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return path


def read_mask_json(path) -> SamplingMask:
    payload = json.loads(Path(path).read_text())
    if isinstance(payload, list):  # bare array form
        indices = payload
        N = max(indices) if indices else 0
    else:
        indices = payload["indices"]
        N = payload.get("N", max(indices) if indices else 0)
    return SamplingMask(indices=np.asarray(indices, dtype=int), N=int(N))


def write_model_json(path, model: SpectralModel, meta: dict | None = None) -> Path:
    path = Path(path)
    payload = {
        "freqs": [float(f) for f in model.freqs],
        "amps": np.asarray(model.amps, dtype=float).tolist(),
        "phases": np.asarray(model.phases, dtype=float).tolist(),
        "is_ca": bool(model.is_ca),
    }
    if meta:
        payload["meta"] = meta
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return path


def read_model_json(path) -> SpectralModel:
    payload = json.loads(Path(path).read_text())
    try:
        return SpectralModel(
            freqs=np.asarray(payload["freqs"], dtype=float),
            amps=np.asarray(payload["amps"], dtype=float),
            phases=np.asarray(payload["phases"], dtype=float),
            is_ca=bool(payload.get("is_ca", False)),
        )
    except KeyError as exc:
        raise ValueError(f"{path}: missing model field {exc}") from exc


def write_report_json(path, report: SolverReport, method: str | None = None) -> Path:
    path = Path(path)
    payload = {
        "iterations": int(report.iterations),
        "stop_reason": report.stop_reason,
        "converged": bool(report.converged),
        "objective_trace": [float(v) for v in report.objective_trace],
        "total_seconds": float(report.total_seconds),
        "iter_seconds": [float(v) for v in report.iter_seconds],
    }
    if method is not None:
        payload["method"] = method
    if report.nmse is not None:
        payload["nmse"] = float(report.nmse)
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return path


def write_freqs_json(path, freqs) -> Path:
    """Bare JSON array of frequencies in [0, 1)."""
    path = Path(path)
    payload = [float(f) for f in np.asarray(freqs, dtype=float)]
    path.write_text(json.dumps(payload) + "\n")
    return path
