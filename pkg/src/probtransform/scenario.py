"""JSON scenario files: parsing, invariant checks and serialization.

Complex numbers are ``[re, im]`` pairs (a bare number is read as real);
operators are row-major nested lists of complex numbers. A scenario is an
object with keys ``dim``, ``state``, ``channels``, ``povms``, ``analysis``
and optionally ``model``; see the README for the full schema.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvariantViolation, ProbTransformError, ScenarioError
from .frequency import ContextModel, ModelKind
from .measurement import KrausChannel, Povm, normalization_gap
from .operators import DEFAULT_TOL, adjoint, hermitian_gap, min_eigenvalue
from .states import DensityOperator, PureState, pure_to_density


# -- primitives --------------------------------------------------------------


def complex_from_json(x) -> complex:
    if isinstance(x, bool):
        raise ScenarioError(f"not a complex number: {x!r}")
    if isinstance(x, (int, float)):
        z = complex(x)
    elif isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        z = complex(x[0], x[1])
    else:
        raise ScenarioError(f"complex numbers are [re, im] pairs, got {x!r}")
    if not cmath.isfinite(z):
        raise ScenarioError(f"non-finite number {x!r}")
    return z


def complex_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def vector_from_json(x) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ScenarioError("vector must be a non-empty list of complex numbers")
    return np.array([complex_from_json(v) for v in x], dtype=np.complex128)


def matrix_from_json(x) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ScenarioError("matrix must be a non-empty list of rows")
    n = len(x)
    if any(len(r) != n for r in x):
        raise ScenarioError(f"matrix must be square; got rows of lengths {[len(r) for r in x]}")
    return np.array([[complex_from_json(v) for v in r] for r in x], dtype=np.complex128)


def vector_to_json(v) -> list:
    return [complex_to_json(z) for z in np.asarray(v)]


def matrix_to_json(m) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m)]


def state_to_json(rho) -> dict:
    if isinstance(rho, PureState):
        return {"kind": "pure", "vec": vector_to_json(rho.vector)}
    return {"kind": "density", "matrix": matrix_to_json(rho.matrix)}


def channel_to_json(ch: KrausChannel) -> dict:
    return {"outcomes": list(ch.outcomes), "kraus": [matrix_to_json(k) for k in ch.kraus_ops]}


def povm_to_json(m: Povm) -> dict:
    return {"outcomes": list(m.outcomes), "elements": [matrix_to_json(e) for e in m.elements]}


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ScenarioError(f"{where}: missing key {key!r}")
    return obj[key]


def state_from_json(obj, tol: float = DEFAULT_TOL) -> DensityOperator:
    kind = _require(obj, "kind", "state")
    if kind == "pure":
        return pure_to_density(PureState(vector_from_json(_require(obj, "vec", "state")), tol=tol))
    if kind == "density":
        return DensityOperator(matrix_from_json(_require(obj, "matrix", "state")), tol=tol)
    raise ScenarioError(f"state kind must be 'pure' or 'density', got {kind!r}")


def channel_from_json(obj, tol: float = DEFAULT_TOL, name: str = "channel") -> KrausChannel:
    outcomes = _require(obj, "outcomes", name)
    ops = [matrix_from_json(m) for m in _require(obj, "kraus", name)]
    try:
        return KrausChannel(tuple(outcomes), tuple(ops), tol=tol)
    except InvariantViolation as exc:
        raise InvariantViolation(exc.check, exc.gap, name) from None


def povm_from_json(obj, tol: float = DEFAULT_TOL, name: str = "povm") -> Povm:
    outcomes = _require(obj, "outcomes", name)
    elems = [matrix_from_json(m) for m in _require(obj, "elements", name)]
    try:
        return Povm(tuple(outcomes), tuple(elems), tol=tol)
    except InvariantViolation as exc:
        raise InvariantViolation(exc.check, exc.gap, name) from None


# -- scenarios ---------------------------------------------------------------


@dataclass
class Scenario:
    dim: int
    state: DensityOperator | None
    channels: dict[str, KrausChannel] = field(default_factory=dict)
    povms: dict[str, Povm] = field(default_factory=dict)
    analysis: dict[str, Any] = field(default_factory=dict)
    model: dict[str, Any] | None = None
    tol: float = DEFAULT_TOL

    def channel(self, name: str) -> KrausChannel:
        try:
            return self.channels[name]
        except KeyError:
            raise ScenarioError(f"unknown channel {name!r}; defined: {sorted(self.channels)}") from None

    def povm(self, name: str) -> Povm:
        try:
            return self.povms[name]
        except KeyError:
            raise ScenarioError(f"unknown POVM {name!r}; defined: {sorted(self.povms)}") from None

    def pair(self) -> tuple[KrausChannel, KrausChannel]:
        """The ``first`` and ``second`` channels named in ``analysis``."""
        a = self.analysis.get("first")
        b = self.analysis.get("second")
        if a is None or b is None:
            names = list(self.channels)
            if len(names) != 2:
                raise ScenarioError("analysis must name 'first' and 'second' channels")
            a, b = names
        return self.channel(a), self.channel(b)

    def require_state(self) -> DensityOperator:
        if self.state is None:
            raise ScenarioError("scenario has no state")
        return self.state

    def context_model(self, seed: int = 0) -> ContextModel:
        cfg = self.model
        if cfg is None:
            raise ScenarioError("scenario has no 'model' section")
        kind = _require(cfg, "kind", "model")
        if kind == ModelKind.QUANTUM_DRIVEN.value:
            first = self.channel(cfg["first"]) if "first" in cfg else self.pair()[0]
            second = self.channel(cfg["second"]) if "second" in cfg else self.pair()[1]
            return ContextModel.quantum_driven(self.require_state(), first, second, seed=seed)
        joint = _require(cfg, "joint", "model")
        if kind == ModelKind.CLASSICAL_INDEPENDENT.value:
            return ContextModel.classical_independent(joint, seed=seed)
        if kind == ModelKind.CLASSICAL_PERTURBED.value:
            return ContextModel.classical_perturbed(joint, _require(cfg, "kernels", "model"), seed=seed)
        raise ScenarioError(f"unknown model kind {kind!r}")


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    return data


def scenario_from_dict(data: dict, tol: float = DEFAULT_TOL) -> Scenario:
    state = state_from_json(data["state"], tol) if "state" in data else None
    channels = {name: channel_from_json(c, tol, name) for name, c in (data.get("channels") or {}).items()}
    povms = {name: povm_from_json(p, tol, name) for name, p in (data.get("povms") or {}).items()}
    dim = data.get("dim")
    if dim is None:
        dims = {x.dim for x in [*channels.values(), *povms.values()] + ([state] if state else [])}
        dim = dims.pop() if len(dims) == 1 else None
    if dim is None:
        raise ScenarioError("cannot determine scenario dimension")
    for name, obj in [("state", state), *channels.items(), *povms.items()]:
        if obj is not None and obj.dim != dim:
            raise ScenarioError(f"{name} has dimension {obj.dim}, scenario dim is {dim}")
    return Scenario(int(dim), state, channels, povms, dict(data.get("analysis") or {}), data.get("model"), tol)


def load_scenario(path: str | Path, tol: float = DEFAULT_TOL) -> Scenario:
    return scenario_from_dict(read_json(path), tol)


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    component: str
    check: str
    gap: float
    passed: bool

    def as_dict(self) -> dict:
        gap = self.gap if np.isfinite(self.gap) else None
        return {"component": self.component, "check": self.check, "gap": gap, "passed": self.passed}


def _mk(component, check, gap, tol) -> Check:
    return Check(component, check, float(gap), bool(gap <= tol))


def _parse_or_fail(component: str, fn, checks: list[Check]):
    try:
        return fn()
    except ProbTransformError as exc:
        checks.append(Check(component, "parse", float("nan"), False))
        return exc


def validate_dict(data: dict, tol: float = DEFAULT_TOL) -> list[Check]:
    """Measure every structural invariant of the scenario without raising on violations."""
    checks: list[Check] = []
    dim = data.get("dim")
    if "state" in data:
        st = data["state"]
        kind = st.get("kind") if isinstance(st, dict) else None
        if kind == "pure":
            v = _parse_or_fail("state", lambda: vector_from_json(st.get("vec")), checks)
            if isinstance(v, np.ndarray):
                checks.append(_mk("state", "unit norm", abs(np.linalg.norm(v) - 1.0), tol))
                dim = dim or len(v)
        else:
            m = _parse_or_fail("state", lambda: matrix_from_json(st.get("matrix") if isinstance(st, dict) else None), checks)
            if isinstance(m, np.ndarray):
                checks.append(_mk("state", "hermiticity", hermitian_gap(m), tol))
                checks.append(_mk("state", "positivity", max(0.0, -min_eigenvalue(m)), tol))
                checks.append(_mk("state", "unit trace", abs(np.trace(m).real - 1.0), tol))
                dim = dim or m.shape[0]
    for name, c in (data.get("channels") or {}).items():
        ops = _parse_or_fail(name, lambda: [matrix_from_json(k) for k in c.get("kraus", [])], checks)
        if not isinstance(ops, list):
            continue
        if not ops or len(ops) != len(c.get("outcomes", [])) or len({k.shape for k in ops}) != 1:
            checks.append(Check(name, "shape", float("nan"), False))
            continue
        d = ops[0].shape[0]
        if dim is not None and d != dim:
            checks.append(Check(name, "dimension", float(abs(d - dim)), False))
            continue
        checks.append(_mk(name, "normalization", normalization_gap((adjoint(k) @ k for k in ops), d), tol))
    for name, p in (data.get("povms") or {}).items():
        elems = _parse_or_fail(name, lambda: [matrix_from_json(e) for e in p.get("elements", [])], checks)
        if not isinstance(elems, list):
            continue
        if not elems or len(elems) != len(p.get("outcomes", [])) or len({e.shape for e in elems}) != 1:
            checks.append(Check(name, "shape", float("nan"), False))
            continue
        d = elems[0].shape[0]
        if dim is not None and d != dim:
            checks.append(Check(name, "dimension", float(abs(d - dim)), False))
            continue
        for lab, e in zip(p["outcomes"], elems):
            checks.append(_mk(f"{name}[{lab}]", "hermiticity", hermitian_gap(e), tol))
            checks.append(_mk(f"{name}[{lab}]", "positivity", max(0.0, -min_eigenvalue(e)), tol))
        checks.append(_mk(name, "normalization", normalization_gap(elems, d), tol))
    names = set(data.get("channels") or {})
    for role in ("first", "second"):
        ref = (data.get("analysis") or {}).get(role)
        if ref is not None:
            checks.append(Check(f"analysis.{role}", "reference", 0.0 if ref in names else float("nan"), ref in names))
    return checks
