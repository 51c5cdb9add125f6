"""JSON formats for algebras, derivations, towers, scenarios and solver instances.

References between files are relative paths, or ``bundled:NAME`` for the
fixtures shipped in ``diffpoly/fixtures``.

Algebra::

    {"modulus": 2, "basis": ["E12", "E13", "E23"],
     "products": {"0,2": [0, 1, 0]}, "unit": null}

Tower (levels are 1-based in the ``d_i(X_j)`` keys, like the variable names)::

    {"base": "n3_z2.json",
     "levels": [{"derivation": {"inner": [1, 0, 0, 0]}},
                {"derivation": [[...], ...], "x_values": {"d_2(X_1)": [0, 0, 0, 1]}}]}

Scenario::

    {"name": "...", "algebra": "n3_z2.json", "tower": {...} | "tower.json",
     "coefficients": {"0": [..], "1": [..]}, "bounds": [1]}
"""

from __future__ import annotations

import hashlib
import json
import re
from importlib import resources
from pathlib import Path
from typing import Any

from .algebra import AlgebraError, Derivation, FiniteAlgebra, leibniz_witness
from .radical import ScenarioInstance, TowerSpec, build_scenario

__all__ = [
    "SpecError",
    "fixture_dir",
    "resolve_ref",
    "load_json_ref",
    "algebra_from_json",
    "algebra_to_json",
    "derivation_from_json",
    "tower_spec_from_json",
    "load_scenario",
    "load_lemma10_instance",
    "file_hash",
]

BUNDLED = "bundled:"
_XKEY = re.compile(r"d_(\d+)\(X_(\d+)\)\Z")


class SpecError(ValueError):
    pass


def fixture_dir() -> Path:
    return Path(str(resources.files("diffpoly") / "fixtures"))


def resolve_ref(ref: str, base_dir: Path | None = None) -> Path:
    if ref.startswith(BUNDLED):
        name = ref[len(BUNDLED) :]
        if not name.endswith(".json"):
            name += ".json"
        return fixture_dir() / name
    p = Path(ref)
    if not p.is_absolute() and base_dir is not None:
        p = base_dir / p
    return p


def file_hash(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_json_ref(ref, base_dir: Path | None, hashes: dict | None = None) -> tuple[Any, Path | None]:
    """Inline objects pass through; string refs are read and their hash recorded."""
    if not isinstance(ref, str):
        return ref, base_dir
    path = resolve_ref(ref, base_dir)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from None
    if hashes is not None:
        hashes[str(ref)] = hashlib.sha256(text).hexdigest()
    return json.loads(text), path.parent


def algebra_from_json(obj: dict) -> FiniteAlgebra:
    try:
        p = int(obj["modulus"])
        labels = list(obj["basis"])
        products = {}
        for key, vec in obj.get("products", {}).items():
            i, j = (int(t) for t in key.split(","))
            products[(i, j)] = [int(c) for c in vec]
        unit = obj.get("unit")
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed algebra spec: {exc}") from None
    try:
        return FiniteAlgebra(p, labels, products, unit=unit, name=obj.get("name"))
    except AlgebraError as exc:
        raise SpecError(str(exc)) from None


def algebra_to_json(A: FiniteAlgebra) -> dict:
    out: dict = {}
    if A.name:
        out["name"] = A.name
    out["modulus"] = A.modulus
    out["basis"] = list(A.labels)
    out["products"] = {f"{i},{j}": v for (i, j), v in sorted(A.products_dict().items())}
    out["unit"] = list(A.unit.coords) if A.unit is not None else None
    return out


def derivation_from_json(obj, A: FiniteAlgebra) -> Derivation:
    """Matrix rows (or ``{"matrix": rows}``); Leibniz failures name the first bad pair."""
    rows = obj["matrix"] if isinstance(obj, dict) else obj
    d = Derivation(A, rows, check=False)
    w = leibniz_witness(d, A)
    if w is not None:
        raise SpecError(f"Leibniz rule fails on basis pair ({A.labels[w[0]]}, {A.labels[w[1]]})")
    return d


def tower_spec_from_json(obj: dict) -> TowerSpec:
    levels = obj.get("levels", [])
    derivs, xvals = [], {}
    for i, lvl in enumerate(levels):
        derivs.append(lvl.get("derivation"))
        for key, val in (lvl.get("x_values") or {}).items():
            m = _XKEY.match(key.replace(" ", ""))
            if not m:
                raise SpecError(f"bad x-value key {key!r}; expected d_i(X_j)")
            li, lj = int(m.group(1)) - 1, int(m.group(2)) - 1
            if li != i:
                raise SpecError(f"key {key!r} listed under level {i + 1}")
            xvals[(li, lj)] = val
    return TowerSpec(derivs, xvals)


def _parse_deg(key: str, n: int) -> tuple:
    deg = tuple(int(t) for t in key.split(",")) if key.strip() else ()
    if len(deg) != n:
        raise SpecError(f"multidegree {key!r} does not have {n} entries")
    return deg


def load_scenario(path_or_obj, base_dir: Path | None = None, hashes: dict | None = None, strict: bool = False) -> ScenarioInstance:
    obj, here = load_json_ref(str(path_or_obj) if isinstance(path_or_obj, Path) else path_or_obj, base_dir, hashes)
    tower_obj, tower_dir = load_json_ref(obj["tower"], here, hashes)
    alg_ref = obj.get("algebra", tower_obj.get("base"))
    if alg_ref is None:
        raise SpecError("scenario names no algebra")
    alg_dir = here if "algebra" in obj else tower_dir
    alg_obj, _ = load_json_ref(alg_ref, alg_dir, hashes)
    R = algebra_from_json(alg_obj)
    spec = tower_spec_from_json(tower_obj)
    n = len(spec.derivations)
    coeffs = {}
    for key, coords in (obj.get("coefficients") or {}).items():
        deg = _parse_deg(key, n)
        if len(coords) == R.dim:
            coeffs[deg] = R.element(coords)
        else:
            coeffs[deg] = coords  # R* coordinates, converted after the hull exists
    inst = build_scenario(R, spec, {}, obj.get("bounds"), obj.get("name", ""), strict=strict)
    if coeffs:
        hull = inst.tower.hull
        conv = {d: (c if not isinstance(c, list) else hull.element(c)) for d, c in coeffs.items()}
        inst = ScenarioInstance(inst.tower, conv, tuple(obj.get("bounds") or ()), inst.audit, inst.name)
    return inst


def load_lemma10_instance(path_or_obj, base_dir: Path | None = None, hashes: dict | None = None) -> dict:
    obj, here = load_json_ref(path_or_obj, base_dir, hashes)
    alg_obj, _ = load_json_ref(obj["algebra"], here, hashes)
    A = algebra_from_json(alg_obj)
    return {
        "algebra": A,
        "e": A.element(obj["e"]),
        "xs": [A.element(x) for x in obj["xs"]],
        "ks": [int(k) for k in obj["ks"]],
    }
