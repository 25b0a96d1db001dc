"""Signal CSV, model JSON and report JSON."""
import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import ContractError
from .signal import SampledSignal, SignalModel

__all__ = [
    "CSV_HEADER",
    "signal_to_csv",
    "signal_from_csv",
    "write_signal",
    "read_signal",
    "model_to_dict",
    "model_from_dict",
    "write_model",
    "read_model",
    "dumps_json",
]

CSV_HEADER = ("index", "t", "re", "im")


def signal_to_csv(signal):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for j, z in enumerate(signal.samples):
        writer.writerow([j, repr(j * signal.dt), repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def signal_from_csv(text, dt=None):
    """Parse ``index,t,re,im`` rows. ``dt`` is taken from the time column."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != CSV_HEADER:
        raise ContractError(f"signal CSV must start with the header {','.join(CSV_HEADER)}")
    body = [r for r in rows[1:] if r]
    if not body:
        raise ContractError("signal CSV has no samples")
    try:
        idx = np.array([int(r[0]) for r in body])
        t = np.array([float(r[1]) for r in body])
        values = np.array([complex(float(r[2]), float(r[3])) for r in body])
    except (ValueError, IndexError) as exc:
        raise ContractError(f"malformed signal CSV row: {exc}") from None
    if not np.array_equal(idx, np.arange(idx.size)):
        raise ContractError("index column must run 0, 1, 2, ... without gaps")
    if dt is None:
        dt = float(t[1] - t[0]) if t.size > 1 else 1.0
    if not np.allclose(t, idx * dt, rtol=1e-9, atol=1e-12 * max(1.0, abs(dt))):
        raise ContractError("time column is not equidistant with t = index * dt")
    return SampledSignal(values, dt)


def write_signal(path, signal):
    Path(path).write_text(signal_to_csv(signal), encoding="utf-8")


def read_signal(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ContractError(f"cannot read signal {path}: {exc.strerror}") from None
    return signal_from_csv(text)


def _pairs(values):
    return [{"re": float(z.real), "im": float(z.imag)} for z in np.asarray(values, dtype=complex)]


def _unpairs(items, name):
    try:
        return np.array([complex(float(d["re"]), float(d["im"])) for d in items])
    except (TypeError, KeyError, ValueError):
        raise ContractError(f"{name} must be a list of {{re, im}} objects") from None


def model_to_dict(model):
    return {"dt": model.dt, "n": model.n, "poles": _pairs(model.poles), "coeffs": _pairs(model.coeffs)}


def model_from_dict(data):
    if not isinstance(data, dict):
        raise ContractError("model JSON must be an object")
    missing = {"dt", "n", "poles", "coeffs"} - set(data)
    if missing:
        raise ContractError(f"model JSON is missing {sorted(missing)}")
    extra = set(data) - {"dt", "n", "poles", "coeffs"}
    if extra:
        raise ContractError(f"model JSON has unknown keys {sorted(extra)}")
    return SignalModel(
        poles=_unpairs(data["poles"], "poles"),
        coeffs=_unpairs(data["coeffs"], "coeffs"),
        dt=data["dt"],
        n=data["n"],
    )


def write_model(path, model):
    Path(path).write_text(dumps_json(model_to_dict(model)), encoding="utf-8")


def read_model(path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ContractError(f"cannot read model {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ContractError(f"model {path} is not valid JSON: {exc.msg}") from None
    return model_from_dict(data)


def dumps_json(obj):
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"
