"""Declarative parameter sweeps and their CSV / JSON tables.

A sweep is described by a plain dict (the same shape as the JSON config
file), validated into a :class:`SweepSpec` and evaluated point by point.
Points where the quantity is undefined (zero signal, collapsed norm, a
vanishing closed-form denominator, ...) stay in the table with the gap
marker ``NA`` and the error code in the ``status`` column.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__, bosonic, kernels, pt
from .errors import EstimationError, SpecError
from .evolution import K_FLOOR, check_state, evolve
from .linalg import MAX_DIM, basis, expectation
from .measurement import check_condition, crb_gap, deviation_vectors, error_propagation
from .qfi import clamp_qfi, qfi_of_state

GAP = "NA"
MODELS = ("pt", "bosonic", "custom-matrix")
QUANTITIES = ("qfi", "i_theta", "k_theta", "channel_qfi", "variance", "crb_gap",
              "sensor", "ratios", "condition_residual")
PT_ONLY = ("channel_qfi", "ratios")
MODEL_PARAMS = {
    "pt": {"r": None, "s": None, "omega": math.pi / 2},
    "bosonic": {"omega0": 1.0, "g": None, "gamma_a": None, "gamma_b": None},
    "custom-matrix": {},
}
STATE_PARAMS = ("m", "phi")


def parse_complex(x):
    """Accept a number, a ``[re, im]`` pair or a string such as ``"1-2j"``."""
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise SpecError(f"complex entry must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def _vector(x, what):
    if isinstance(x, np.ndarray):
        return x.astype(np.complex128)
    try:
        return np.array([parse_complex(v) for v in x], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{what}: {exc}") from None


def _matrix(x, what):
    if isinstance(x, np.ndarray):
        return x.astype(np.complex128)
    try:
        return np.array([[parse_complex(v) for v in row] for row in x], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{what}: {exc}") from None


def _encode(a):
    """Complex array -> nested [re, im] lists for metadata."""
    a = np.asarray(a)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_encode(v) for v in a]


@dataclass(frozen=True)
class Grid:
    name: str
    lo: float
    hi: float
    steps: int

    def values(self):
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    model: str
    quantity: str
    grid: Grid
    params: dict = field(default_factory=dict)
    theta: float = 0.0
    initial_state: pt.InitialStateSpec = pt.InitialStateSpec()
    measurement: np.ndarray = None
    matrix: np.ndarray = None

    @property
    def columns(self):
        vals = ("s0", "s1") if self.quantity == "ratios" else (self.quantity,)
        return (self.grid.name,) + vals + ("status",)

    def to_dict(self):
        st = self.initial_state
        out = {
            "model": self.model,
            "quantity": self.quantity,
            "grid": {"name": self.grid.name, "min": self.grid.lo, "max": self.grid.hi,
                     "steps": self.grid.steps},
            "params": dict(sorted(self.params.items())),
            "theta": self.theta,
            "initial_state": {"m": st.m, "phi": st.phi, "basis": st.basis,
                              "vector": None if st.vector is None else _encode(np.asarray(st.vector))},
            "measurement": None if self.measurement is None else _encode(self.measurement),
            "matrix": None if self.matrix is None else _encode(self.matrix),
        }
        return out


def _number(d, key, what, default=None):
    v = d.get(key, default)
    if v is None:
        raise SpecError(f"{what}: missing required field '{key}'")
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise SpecError(f"{what}.{key}: expected a number, got {v!r}") from None
    if not math.isfinite(v):
        raise SpecError(f"{what}.{key}: must be finite")
    return v


def spec_from_dict(d):
    """Validate a config dict into a :class:`SweepSpec` (field-level SpecError messages)."""
    if not isinstance(d, dict):
        raise SpecError("spec must be a mapping")
    known = {"model", "quantity", "grid", "params", "theta", "initial_state",
             "measurement", "matrix", "description"}
    extra = set(d) - known
    if extra:
        raise SpecError(f"unknown field(s): {', '.join(sorted(extra))}")
    model = d.get("model", "pt")
    if model not in MODELS:
        raise SpecError(f"model: expected one of {', '.join(MODELS)}, got {model!r}")
    quantity = d.get("quantity", "qfi")
    if quantity not in QUANTITIES:
        raise SpecError(f"quantity: expected one of {', '.join(QUANTITIES)}, got {quantity!r}")
    if quantity in PT_ONLY and model != "pt":
        raise SpecError(f"quantity: {quantity} is only defined for the pt model")

    raw = dict(d.get("params") or {})
    params = {}
    for key, default in MODEL_PARAMS[model].items():
        if key in raw or default is not None:
            params[key] = _number(raw, key, "params", default)
    unknown = set(raw) - set(MODEL_PARAMS[model])
    if unknown:
        raise SpecError(f"params: unknown for model {model}: {', '.join(sorted(unknown))}")

    g = d.get("grid")
    if not isinstance(g, dict):
        raise SpecError("grid: missing or not a mapping")
    name = g.get("name", "theta")
    allowed = ("theta",) + tuple(MODEL_PARAMS[model]) + (STATE_PARAMS if model == "pt" else ())
    if name not in allowed:
        raise SpecError(f"grid.name: expected one of {', '.join(allowed)}, got {name!r}")
    lo = _number(g, "min", "grid")
    hi = _number(g, "max", "grid")
    steps = g.get("steps")
    if not isinstance(steps, int) or isinstance(steps, bool):
        raise SpecError(f"grid.steps: expected an integer, got {steps!r}")
    if steps < 2:
        raise SpecError(f"grid.steps: need at least 2, got {steps}")
    if lo == hi:
        raise SpecError("grid: min and max are equal (degenerate grid)")
    if name in MODEL_PARAMS[model] and name not in params:
        params[name] = lo
    missing = [k for k, v in MODEL_PARAMS[model].items() if v is None and k not in params]
    if missing:
        raise SpecError(f"params: missing required field(s) {', '.join(missing)}")

    theta = _number(d, "theta", "spec", 0.0)

    st = dict(d.get("initial_state") or {})
    unknown = set(st) - {"m", "phi", "basis", "vector"}
    if unknown:
        raise SpecError(f"initial_state: unknown field(s) {', '.join(sorted(unknown))}")
    default_basis = "eigen" if model == "pt" else "explicit"
    basis_kind = st.get("basis", default_basis)
    kinds = ("eigen", "eigen-unbroken", "eigen-broken", "explicit") if model == "pt" else ("explicit",)
    if basis_kind not in kinds:
        raise SpecError(f"initial_state.basis: expected one of {', '.join(kinds)}, got {basis_kind!r}")
    vec = st.get("vector")
    if vec is not None:
        vec = _vector(vec, "initial_state.vector")
        norm = np.linalg.norm(vec)
        if vec.ndim != 1 or not np.isfinite(norm) or norm == 0:
            raise SpecError("initial_state.vector: must be a finite non-zero vector")
        vec = tuple(vec / norm)
    init = pt.InitialStateSpec(_number(st, "m", "initial_state", 1.0),
                               _number(st, "phi", "initial_state", 0.0), basis_kind, vec)

    matrix = d.get("matrix")
    if model == "custom-matrix":
        if matrix is None:
            raise SpecError("matrix: custom-matrix model needs an explicit matrix")
        matrix = _matrix(matrix, "matrix")
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise SpecError(f"matrix: must be square, got shape {matrix.shape}")
        if not 1 <= matrix.shape[0] <= MAX_DIM:
            raise SpecError(f"matrix: dimension must be in [1, {MAX_DIM}]")
        if not np.all(np.isfinite(matrix)):
            raise SpecError("matrix: entries must be finite")
    elif matrix is not None:
        raise SpecError(f"matrix: only valid for the custom-matrix model, not {model}")
    dim = matrix.shape[0] if model == "custom-matrix" else 2
    if vec is not None and len(vec) != dim:
        raise SpecError(f"initial_state.vector: expected dimension {dim}, got {len(vec)}")

    meas = d.get("measurement")
    if meas is not None:
        meas = _matrix(meas, "measurement")
        if meas.shape != (dim, dim):
            raise SpecError(f"measurement: expected a {dim}x{dim} matrix, got shape {meas.shape}")
        if np.max(np.abs(meas - meas.conj().T)) > 1e-12:
            raise SpecError("measurement: operator is not Hermitian")
    return SweepSpec(model, quantity, Grid(name, lo, hi, steps), params, theta, init, meas, matrix)


@dataclass
class _Point:
    H: np.ndarray
    psi0: np.ndarray
    A: np.ndarray
    pt_params: object
    init: pt.InitialStateSpec


def _setup(spec, name=None, value=None):
    """Generator, initial state and measurement for one grid value."""
    params = dict(spec.params)
    init = spec.initial_state
    if name in STATE_PARAMS:
        init = replace(init, **{name: value})
    elif name is not None and name != "theta":
        params[name] = value
    dim = 2
    pp = None
    if spec.model == "pt":
        pp = pt.PtParams(params["r"], params["s"], params["omega"])
        H = pt.build(pp)
        psi0 = pt.initial_state(pp, init)
    elif spec.model == "bosonic":
        bp = bosonic.BosonicParams(params["omega0"], params["g"], params["gamma_a"], params["gamma_b"])
        H = bosonic.effective_hamiltonian(bp)
        psi0 = bosonic.initial_state() if init.vector is None else np.asarray(init.vector)
    else:
        H = spec.matrix
        dim = H.shape[0]
        psi0 = basis(dim, 0) if init.vector is None else np.asarray(init.vector)
    A = spec.measurement
    if A is None:
        A = np.zeros((dim, dim), dtype=np.complex128)
        A[0, 0] = 1.0
    return _Point(H, np.asarray(psi0, dtype=np.complex128), A, pp, init)


def _evaluate(spec, p, theta):
    q = spec.quantity
    if q in ("qfi", "i_theta", "k_theta"):
        state = evolve(p.H, p.psi0, theta)
        if q == "k_theta":
            return (state.k_theta,)
        f = qfi_of_state(p.H, state)
        return (f if q == "qfi" else state.k_theta * f,)
    if q == "channel_qfi":
        return (pt.channel_qfi(p.pt_params),)
    if q == "variance":
        return (error_propagation(p.H, p.A, p.psi0, theta, 1),)
    if q == "crb_gap":
        return (crb_gap(p.H, p.A, p.psi0, theta),)
    if q == "sensor":
        state = evolve(p.H, p.psi0, theta)
        return (expectation(p.A, state.normalized).real,)
    if q == "ratios":
        return pt.hermitian_ratios(p.pt_params, p.init.m, p.init.phi, theta)
    if q == "condition_residual":
        f, g = deviation_vectors(p.H, p.A, p.psi0, theta)
        return (check_condition(f, g).residual,)
    raise SpecError(f"unknown quantity {q!r}")


@dataclass(frozen=True)
class SweepResult:
    columns: tuple
    rows: tuple
    metadata: dict

    def values(self, column):
        k = self.columns.index(column)
        return np.array([np.nan if r[k] is None else r[k] for r in self.rows], dtype=float)


def _fast_theta_rows(spec, p, thetas):
    """Batched qfi / i_theta / k_theta over a theta grid for 2x2 generators."""
    H, psi0 = check_state(p.H, p.psi0)
    q, k = kernels.qfi2_batch(H, np.broadcast_to(psi0, (thetas.size, 2)), thetas)
    rows = []
    for t, qv, kv in zip(thetas, q, k):
        if not kv >= K_FLOOR:
            rows.append((float(t), None, "K_COLLAPSE"))
            continue
        f = clamp_qfi(float(qv))
        val = {"qfi": f, "i_theta": float(kv) * f, "k_theta": float(kv)}[spec.quantity]
        rows.append((float(t), val, "ok"))
    return rows


def run_sweep(spec):
    if isinstance(spec, dict):
        spec = spec_from_dict(spec)
    grid = spec.grid
    width = len(spec.columns) - 2
    rows = []
    if grid.name == "theta":
        p = _setup(spec)
        thetas = grid.values()
        if spec.quantity in ("qfi", "i_theta", "k_theta") and p.H.shape[0] == 2:
            rows = _fast_theta_rows(spec, p, thetas)
        else:
            for t in thetas:
                rows.append(_row(spec, p, float(t), float(t), width))
    else:
        for v in grid.values():
            try:
                p = _setup(spec, grid.name, float(v))
            except SpecError:
                raise
            except EstimationError as exc:
                rows.append((float(v),) + (None,) * width + (exc.code,))
                continue
            rows.append(_row(spec, p, float(v), spec.theta, width))
    meta = {"tool": "nhqfi", "version": __version__, "spec": spec.to_dict(),
            "columns": list(spec.columns)}
    return SweepResult(spec.columns, tuple(rows), meta)


def _row(spec, p, gv, theta, width):
    try:
        vals = _evaluate(spec, p, theta)
    except SpecError:
        raise
    except EstimationError as exc:
        return (gv,) + (None,) * width + (exc.code,)
    return (gv,) + tuple(float(v) for v in vals) + ("ok",)


def _fmt(v):
    if v is None:
        return GAP
    if isinstance(v, str):
        return v
    return "%.12g" % v


def to_csv(result):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def to_json(result):
    records = [dict(zip(result.columns, row)) for row in result.rows]
    doc = {"metadata": result.metadata, "records": records}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def render(result, fmt="csv"):
    if fmt == "csv":
        return to_csv(result)
    if fmt == "json":
        return to_json(result)
    raise SpecError(f"format: expected csv or json, got {fmt!r}")
