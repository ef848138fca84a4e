"""JSON formats for matrices, states, ensembles, channels and spectra.

Floats are written with 12 significant digits.  Readers validate: a state
whose trace, Hermiticity or positivity is off beyond the package tolerances
is rejected.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .channels import Channel, from_family
from .energy import EnergySpec, OscillatorSpec
from .ensembles import Ensemble
from .errors import FormatError
from .qmat import DensityMatrix

SIG_DIGITS = 12


def round_float(x: float) -> float | None:
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(format(x, f".{SIG_DIGITS}g"))


def clean(obj):
    """Make ``obj`` strict-JSON serializable with 12 significant digits; non-finite floats become ``null``."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_float(obj)
    if isinstance(obj, complex):
        return [round_float(obj.real), round_float(obj.imag)]
    return obj


def dumps(obj) -> str:
    return json.dumps(clean(obj), indent=2, allow_nan=False)


def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=complex)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[round_float(z.real), round_float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(data) -> np.ndarray:
    try:
        rows, cols = int(data["rows"]), int(data["cols"])
        entries = data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"matrix JSON needs rows, cols and entries: {exc}") from None
    if len(entries) != rows * cols:
        raise FormatError(f"expected {rows * cols} entries, got {len(entries)}")
    vals = []
    for e in entries:
        if isinstance(e, (int, float)):
            vals.append(complex(e))
        elif isinstance(e, (list, tuple)) and len(e) == 2:
            vals.append(complex(float(e[0]), float(e[1])))
        else:
            raise FormatError(f"matrix entry {e!r} is not [re, im]")
    return np.array(vals, dtype=complex).reshape(rows, cols)


def state_to_json(rho: DensityMatrix) -> dict:
    out = matrix_to_json(rho.matrix)
    out["dims"] = list(rho.dims)
    return out


def state_from_json(data) -> DensityMatrix:
    m = matrix_from_json(data)
    return DensityMatrix(m, data.get("dims"))


def ensemble_to_json(mu: Ensemble) -> dict:
    return {"items": [{"p": round_float(p), "state": state_to_json(s)} for p, s in mu.items()]}


def ensemble_from_json(data) -> Ensemble:
    try:
        items = data["items"]
        return Ensemble([float(it["p"]) for it in items], [state_from_json(it["state"]) for it in items])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"ensemble JSON needs items with p and state: {exc}") from None


def channel_to_json(ch: Channel) -> dict:
    return {"kraus": [matrix_to_json(k) for k in ch.kraus], "d_in": ch.d_in, "d_out": ch.d_out}


def channel_from_json(data) -> Channel:
    if "family" in data:
        try:
            return from_family(data["family"], int(data["d"]), float(data.get("p", 0.0)), data.get("target"))
        except KeyError as exc:
            raise FormatError(f"family shorthand needs {exc}") from None
    try:
        kraus = [matrix_from_json(k) for k in data["kraus"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"channel JSON needs kraus: {exc}") from None
    ch = Channel(kraus)
    if ("d_in" in data and int(data["d_in"]) != ch.d_in) or ("d_out" in data and int(data["d_out"]) != ch.d_out):
        raise FormatError("d_in/d_out disagree with the Kraus shapes")
    return ch


def energy_to_json(spec) -> dict:
    if isinstance(spec, OscillatorSpec):
        return {"omegas": list(spec.omegas)}
    return {"levels": clean(spec.levels), "label": spec.label}


def energy_from_json(data):
    if "omegas" in data:
        return OscillatorSpec(data["omegas"])
    if "levels" in data:
        return EnergySpec(data["levels"], data.get("label", ""))
    raise FormatError("energy JSON needs 'levels' or 'omegas'")


def load(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
