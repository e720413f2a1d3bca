"""Batch machinery: parameter scans, convergence studies, CSV/JSON emission.

Scans evaluate one quantity on a rectangular parameter grid in row-major
axis order; per-point numeric-domain failures become rows with a non-ok
status instead of aborting (branch-cut regions are expected and
interesting). Output bytes are deterministic: fixed column order, shortest
round-trip float formatting, LF line endings, and grid-order emission
regardless of how many workers evaluated the points.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import partial
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .errors import (ChrononLabError, InvalidInput, RefusedTooLarge,
                     UndefinedRatio)
from .evolution import (ChrononParams, TwoState, UnitSystem,
                        continuous_propagator, evolve, symmetric_hamiltonian)
from .kaon import KaonModel, epsilon_mixing, width_shift
from .spectrum import imag_real_ratio, mode_report

SCHEMA_VERSION = 1
DEFAULT_GRID_CAP = 1_000_000


# ---------------------------------------------------------------------------
# scan specification

@dataclass(frozen=True)
class ScanAxis:
    name: str
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 1 or int(self.count) != self.count:
            raise InvalidInput(f"axis {self.name!r}: count must be a positive integer")
        if self.spacing not in ("linear", "log"):
            raise InvalidInput(f"axis {self.name!r}: spacing must be linear or log")
        if self.spacing == "log" and (self.start <= 0 or self.stop <= 0):
            raise InvalidInput(f"axis {self.name!r}: log spacing needs positive bounds")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.start)])
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class ScanSpec:
    quantity: str
    grid: tuple[ScanAxis, ...]
    fixed: dict = field(default_factory=dict)
    max_points: int = DEFAULT_GRID_CAP

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise InvalidInput(
                f"unknown quantity {self.quantity!r}; known: {sorted(QUANTITIES)}")
        names = [ax.name for ax in self.grid]
        if len(set(names)) != len(names):
            raise InvalidInput("axis names must be unique")
        schema = _PARAM_SCHEMAS[self.quantity]
        for name in names:
            if name not in schema or schema[name] not in (float, int):
                raise InvalidInput(
                    f"axis {name!r} is not a numeric parameter of {self.quantity!r}")
        for key in self.fixed:
            if key not in schema:
                raise InvalidInput(f"unknown parameter {key!r} for {self.quantity!r}")
        overlap = set(names) & set(self.fixed)
        if overlap:
            raise InvalidInput(f"parameters {sorted(overlap)} both fixed and scanned")

    @property
    def total_points(self) -> int:
        return int(np.prod([ax.count for ax in self.grid], dtype=np.int64)) \
            if self.grid else 1

    @classmethod
    def from_dict(cls, d: dict) -> "ScanSpec":
        if not isinstance(d, dict):
            raise InvalidInput("scan spec must be a JSON object")
        unknown = set(d) - {"quantity", "grid", "fixed", "max_points"}
        if unknown:
            raise InvalidInput(f"unknown scan spec keys {sorted(unknown)}")
        try:
            axes = tuple(ScanAxis(a["name"], float(a["start"]), float(a["stop"]),
                                  int(a["count"]), a.get("spacing", "linear"))
                         for a in d.get("grid", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed grid axis: {exc}") from exc
        return cls(quantity=d.get("quantity", ""), grid=axes,
                   fixed=dict(d.get("fixed", {})),
                   max_points=int(d.get("max_points", DEFAULT_GRID_CAP)))

    @classmethod
    def from_json_file(cls, path) -> "ScanSpec":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"scan spec is not valid JSON: {exc}") from exc
        return cls.from_dict(payload)

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "grid": [{"name": ax.name, "start": ax.start, "stop": ax.stop,
                      "count": ax.count, "spacing": ax.spacing} for ax in self.grid],
            "fixed": dict(self.fixed),
            "max_points": self.max_points,
        }


# ---------------------------------------------------------------------------
# quantity evaluators (module level: they must pickle into worker processes)

_CHRONON_KEYS = {"n": int, "tau_scale": float, "hbar": float}
_KAON_KEYS = {"mixing_e": float, "gamma_s": float, "gamma_l": float,
              "delta_re": float, "delta_im": float}

_PARAM_SCHEMAS = {
    "mode_report": {"energy": float, "diag": float, "convention": str,
                    **_CHRONON_KEYS},
    "epsilon": {**_KAON_KEYS, **_CHRONON_KEYS, "engine": str},
    "width_shift": {**_KAON_KEYS, **_CHRONON_KEYS},
    "trajectory-observable": {"energy": float, "diag": float, "engine": str,
                              "t_max": float, "steps": int, "psi0": str,
                              "observable": str, "direction": str,
                              **_CHRONON_KEYS},
}

_PARAM_DEFAULTS = {
    "mode_report": {"diag": 0.0, "convention": "paper", "n": 1,
                    "tau_scale": 1.0, "hbar": 1.0},
    "epsilon": {"gamma_s": 0.0, "gamma_l": 0.0, "delta_re": 0.0,
                "delta_im": 0.0, "n": 1, "tau_scale": 1.0, "hbar": 1.0,
                "engine": "continuous"},
    "width_shift": {"gamma_s": 0.0, "gamma_l": 0.0, "delta_re": 0.0,
                    "delta_im": 0.0, "n": 1, "tau_scale": 1.0, "hbar": 1.0},
    "trajectory-observable": {"diag": 0.0, "engine": "continuous", "n": 1,
                              "tau_scale": 1.0, "hbar": 1.0, "psi0": "1,0",
                              "observable": "norm2_final", "direction": "1,0"},
}

_MODE_COLS = [f"mode{k}_{c}" for k in (0, 1) for c in (
    "h", "lambda_re", "lambda_im", "heff_re", "heff_im", "hfirst_re",
    "hfirst_im", "step_mag", "efold_time", "ratio_exact", "ratio_first")]

QUANTITY_COLUMNS = {
    "mode_report": _MODE_COLS + ["nu_nonhermitian"],
    "epsilon": ["epsilon_re", "epsilon_im", "epsilon_abs"],
    "width_shift": [f"{lbl}_{c}" for lbl in ("fast", "slow") for c in (
        "h_re", "h_im", "lambda_re", "lambda_im", "lambda_abs",
        "gamma_continuous", "gamma_effective")],
    "trajectory-observable": ["value"],
}


def parse_complex_pair(text: str) -> np.ndarray:
    """Parse 'a,b' with complex literals a and b, e.g. '1,0' or '0.6,0.8j'."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 2:
        raise InvalidInput(f"expected two comma-separated complex numbers, got {text!r}")
    try:
        return np.array([complex(parts[0]), complex(parts[1])], dtype=np.complex128)
    except ValueError as exc:
        raise InvalidInput(f"cannot parse complex pair {text!r}: {exc}") from exc


def _coerce_params(quantity: str, params: dict) -> dict:
    schema = _PARAM_SCHEMAS[quantity]
    out = dict(_PARAM_DEFAULTS[quantity])
    out.update(params)
    missing = set(schema) - set(out)
    if missing:
        raise InvalidInput(f"{quantity}: missing parameters {sorted(missing)}")
    for key, typ in schema.items():
        if typ in (float, int):
            out[key] = typ(out[key])
    return out


def _chronon_of(params: dict, energy_key: str) -> tuple[ChrononParams, UnitSystem]:
    p = ChrononParams(energy=params[energy_key], n=params["n"],
                      tau_scale=params["tau_scale"])
    return p, UnitSystem(hbar=params["hbar"])


def _kaon_of(params: dict, units: UnitSystem) -> KaonModel:
    return KaonModel(mixing_energy=params["mixing_e"],
                     gamma_short=params["gamma_s"], gamma_long=params["gamma_l"],
                     delta=complex(params["delta_re"], params["delta_im"]),
                     units=units)


def _eval_mode_report(params: dict) -> dict:
    p, units = _chronon_of(params, "energy")
    h = symmetric_hamiltonian(params["energy"], params["diag"])
    spec = mode_report(h, p, units, params["convention"])
    row = {}
    for rec in spec.modes:
        k = rec.mode_index
        row[f"mode{k}_h"] = rec.h_continuous
        row[f"mode{k}_lambda_re"] = rec.lambda_step.real
        row[f"mode{k}_lambda_im"] = rec.lambda_step.imag
        row[f"mode{k}_heff_re"] = rec.h_eff_exact.real
        row[f"mode{k}_heff_im"] = rec.h_eff_exact.imag
        row[f"mode{k}_hfirst_re"] = rec.h_first_order.real
        row[f"mode{k}_hfirst_im"] = rec.h_first_order.imag
        row[f"mode{k}_step_mag"] = rec.step_magnitude
        row[f"mode{k}_efold_time"] = rec.efold_time
        for which, col in (("exact", "ratio_exact"), ("first_order", "ratio_first")):
            try:
                row[f"mode{k}_{col}"] = imag_real_ratio(rec, which)
            except UndefinedRatio:
                row[f"mode{k}_{col}"] = None
    row["nu_nonhermitian"] = spec.nu_nonhermitian
    return row


def _eval_epsilon(params: dict) -> dict:
    p, units = _chronon_of(params, "mixing_e")
    eps = epsilon_mixing(_kaon_of(params, units), p, params["engine"])
    return {"epsilon_re": eps.real, "epsilon_im": eps.imag, "epsilon_abs": abs(eps)}


def _eval_width_shift(params: dict) -> dict:
    p, units = _chronon_of(params, "mixing_e")
    fast, slow = width_shift(_kaon_of(params, units), p)
    row = {}
    for lbl, rec in (("fast", fast), ("slow", slow)):
        row[f"{lbl}_h_re"] = rec.h_generator.real
        row[f"{lbl}_h_im"] = rec.h_generator.imag
        row[f"{lbl}_lambda_re"] = rec.lambda_step.real
        row[f"{lbl}_lambda_im"] = rec.lambda_step.imag
        row[f"{lbl}_lambda_abs"] = abs(rec.lambda_step)
        row[f"{lbl}_gamma_continuous"] = rec.gamma_continuous
        row[f"{lbl}_gamma_effective"] = rec.gamma_effective
    return row


def _eval_trajectory_observable(params: dict) -> dict:
    p, units = _chronon_of(params, "energy")
    h = symmetric_hamiltonian(params["energy"], params["diag"])
    traj = evolve(h, TwoState(parse_complex_pair(params["psi0"])),
                  params["engine"], params["t_max"], params["steps"], p, units)
    obs = params["observable"]
    if obs == "norm2_final":
        value = float(traj.norm_sq()[-1])
    elif obs == "prob_final":
        d = parse_complex_pair(params["direction"])
        d = d / np.linalg.norm(d)
        value = float(abs(traj.states[-1] @ d.conj()) ** 2)
    else:
        raise InvalidInput(f"unknown observable {obs!r}")
    return {"value": value}


QUANTITIES = {
    "mode_report": _eval_mode_report,
    "epsilon": _eval_epsilon,
    "width_shift": _eval_width_shift,
    "trajectory-observable": _eval_trajectory_observable,
}


def evaluate_point(quantity: str, params: dict) -> dict:
    """One grid point: quantity columns plus a status field.

    Numeric-domain and input errors are captured per point (status carries
    the error class name, value columns stay empty).
    """
    try:
        coerced = _coerce_params(quantity, params)
        row = QUANTITIES[quantity](coerced)
        row["status"] = "ok"
    except ChrononLabError as exc:
        row = {col: None for col in QUANTITY_COLUMNS[quantity]}
        row["status"] = type(exc).__name__
    return row


# ---------------------------------------------------------------------------
# scan driver

def scan_columns(spec: ScanSpec) -> list[str]:
    return [ax.name for ax in spec.grid] + QUANTITY_COLUMNS[spec.quantity] + ["status"]


def run_scan(spec: ScanSpec, workers: int = 1) -> list[dict]:
    """Evaluate the grid in row-major axis order; output order is grid order
    regardless of worker count."""
    total = spec.total_points
    cap = min(spec.max_points, DEFAULT_GRID_CAP)
    if total > cap:
        raise RefusedTooLarge(f"scan has {total} points, cap is {cap}")
    axis_values = [ax.values() for ax in spec.grid]
    names = [ax.name for ax in spec.grid]
    points = [dict(zip(names, (float(v) for v in combo)))
              for combo in product(*axis_values)]
    params_list = [{**spec.fixed, **pt} for pt in points]

    eval_one = partial(evaluate_point, spec.quantity)
    if workers <= 1:
        results = [eval_one(ps) for ps in params_list]
    else:
        chunk = max(1, total // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(eval_one, params_list, chunksize=chunk))

    cols = QUANTITY_COLUMNS[spec.quantity]
    rows = []
    for pt, res in zip(points, results):
        row = dict(pt)
        for c in cols:
            row[c] = res[c]
        row["status"] = res["status"]
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# convergence study

CONVERGENCE_COLUMNS = ["m", "max_entry_error", "observed_order", "status"]


def convergence_study(energy: float, t_max: float, m_list,
                      hbar: float = 1.0) -> list[dict]:
    """Error of the m-fold composed step map against the exact propagator.

    observed_order between consecutive valid rows is
    log(err_prev / err) / log(m / m_prev), ~1 for this forward-difference
    scheme. Rows where the composition overflows are flagged invalid and
    skipped in the order bookkeeping, not fatal.
    """
    m_list = [int(m) for m in m_list]
    if any(m < 2 for m in m_list) or m_list != sorted(m_list):
        raise InvalidInput("m_list must be ascending integers >= 2")
    units = UnitSystem(hbar=hbar)
    h = symmetric_hamiltonian(energy)
    target = continuous_propagator(h, t_max, units)
    rows = []
    prev = None  # (m, err) of the last valid row
    for m in m_list:
        dt = t_max / m
        u = np.eye(2, dtype=np.complex128) - (1j * dt / hbar) * h
        composed = kernels.compose_steps(u, m)
        if not np.all(np.isfinite(composed)):
            rows.append({"m": m, "max_entry_error": None,
                         "observed_order": None, "status": "invalid"})
            continue
        err = float(np.max(np.abs(composed - target)))
        order = None
        if prev is not None and err > 0 and prev[1] > 0 and m != prev[0]:
            order = math.log(prev[1] / err) / math.log(m / prev[0])
        rows.append({"m": m, "max_entry_error": err,
                     "observed_order": order, "status": "ok"})
        prev = (m, err)
    return rows


# ---------------------------------------------------------------------------
# emission and manifests

def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        if x == 0.0:
            x = 0.0  # fold -0.0
        return repr(x)
    return str(value)


def _json_value(value):
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    x = float(value)
    if math.isinf(x) or math.isnan(x):
        return _cell(x)  # keep the document strictly valid JSON
    return x + 0.0 if x == 0.0 else x


def render(rows: list[dict], fmt: str = "csv",
           columns: list[str] | None = None) -> bytes:
    """Serialize rows to CSV (RFC 4180, LF endings) or JSON bytes.

    Floats use shortest round-trip decimals; None becomes an empty CSV
    field / JSON null; non-finite floats become 'inf'/'-inf'/'nan'.
    """
    if columns is None:
        if not rows:
            raise InvalidInput("empty row set needs an explicit column list")
        columns = list(rows[0].keys())
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        payload = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    raise InvalidInput(f"format must be csv or json, got {fmt!r}")


def digest_of(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def emit(rows: list[dict], fmt: str = "csv", destination=None,
         columns: list[str] | None = None) -> str:
    """Render and write rows; returns the SHA-256 hex digest of the bytes.

    destination None writes to stdout; a path-like writes the file.
    """
    data = render(rows, fmt, columns)
    if destination is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(destination).write_bytes(data)
    return digest_of(data)


@dataclass(frozen=True)
class RunManifest:
    schema_version: int
    timestamp: str
    parameters: dict
    artifact_version: str
    outputs: dict

    def to_json(self) -> str:
        return json.dumps({
            "schema_version": self.schema_version,
            "timestamp": self.timestamp,
            "parameters": self.parameters,
            "artifact_version": self.artifact_version,
            "outputs": self.outputs,
        }, indent=2) + "\n"


def build_manifest(parameters: dict, outputs: dict) -> RunManifest:
    return RunManifest(
        schema_version=SCHEMA_VERSION,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        parameters=parameters,
        artifact_version=__version__,
        outputs=outputs,
    )


def manifest_path_for(out_path) -> Path:
    out = Path(out_path)
    return out.with_name(out.name + ".manifest.json")


def emit_with_manifest(rows: list[dict], fmt: str, out_path, parameters: dict,
                       columns: list[str] | None = None) -> RunManifest:
    """Write rows to out_path plus `<out>.manifest.json` beside it."""
    digest = emit(rows, fmt, out_path, columns)
    manifest = build_manifest(parameters, {Path(out_path).name: digest})
    manifest_path_for(out_path).write_text(manifest.to_json(), encoding="utf-8")
    return manifest


# ---------------------------------------------------------------------------
# kaon model config files (flat `key = value`, '#' comments)

KAON_CONFIG_SCHEMA = {
    "hbar": float, "mixing_e": float, "gamma_s": float, "gamma_l": float,
    "delta_re": float, "delta_im": float, "n": int, "tau_scale": float,
    "t_max": float, "steps": int, "psi0": str,
}

_KAON_CONFIG_DEFAULTS = {
    "hbar": 1.0, "gamma_s": 0.0, "gamma_l": 0.0, "delta_re": 0.0,
    "delta_im": 0.0, "n": 1, "tau_scale": 1.0, "psi0": "K0",
}


def load_kaon_config(path) -> dict:
    """Parse a kaon model config file into a typed dict.

    Format: UTF-8 text, one `key = value` per line, '#' starts a comment.
    Required key: mixing_e. t_max/steps are only needed for trajectory
    observables.
    """
    cfg = dict(_KAON_CONFIG_DEFAULTS)
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KAON_CONFIG_SCHEMA:
            raise InvalidInput(f"{path}:{lineno}: unknown key {key!r}")
        try:
            cfg[key] = KAON_CONFIG_SCHEMA[key](value)
        except ValueError as exc:
            raise InvalidInput(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    if "mixing_e" not in cfg:
        raise InvalidInput(f"{path}: missing required key 'mixing_e'")
    return cfg


def kaon_from_config(cfg: dict) -> tuple[KaonModel, ChrononParams]:
    units = UnitSystem(hbar=cfg["hbar"])
    model = KaonModel(mixing_energy=cfg["mixing_e"], gamma_short=cfg["gamma_s"],
                      gamma_long=cfg["gamma_l"],
                      delta=complex(cfg["delta_re"], cfg["delta_im"]),
                      units=units)
    params = ChrononParams(energy=cfg["mixing_e"], n=cfg["n"],
                           tau_scale=cfg["tau_scale"])
    return model, params
