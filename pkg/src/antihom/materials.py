"""Material tables and JSON stack/template files.

Materials file: ``{name: {"n": float, "k": float, "wavelength_nm": float}}``
with optional ``"placeholder": true`` and ``"note"``.  Placeholder entries
are refused unless the caller explicitly allows them.

Stack file: a JSON list of layers, each ``{"material": name,
"thickness_nm": float}`` or ``{"n": float, "k": float, "thickness_nm":
float}``.  A template file is either such a list or an object
``{"layers": [...], "bounds": {name: [lo, hi]}, "ambient_in": 1.0,
"ambient_out": 1.0}`` where any of ``thickness_nm``, ``n``, ``k`` may be a
string naming a free parameter.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .optics import Layer, LayerStack, LayerTemplate, Param, StackTemplate

WAVELENGTH_TOL_NM = 1e-6


@dataclass(frozen=True)
class Material:
    name: str
    n: float
    k: float
    wavelength_nm: float
    placeholder: bool = False
    note: str = ""

    @property
    def index(self) -> complex:
        return complex(self.n, self.k)


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def load_materials(path: str | Path | None = None) -> dict[str, Material]:
    """Load a materials table; the bundled one when ``path`` is None."""
    if path is None:
        raw = json.loads(resources.files("antihom").joinpath("data", "materials.json").read_text("utf-8"))
    else:
        raw = _read_json(path)
    if not isinstance(raw, dict):
        raise ConfigError("materials file must hold a JSON object")
    out = {}
    for name, entry in raw.items():
        try:
            out[name] = Material(
                name,
                float(entry["n"]),
                float(entry.get("k", 0.0)),
                float(entry["wavelength_nm"]),
                bool(entry.get("placeholder", False)),
                str(entry.get("note", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"material {name!r}: malformed entry ({exc})") from None
        if out[name].k < 0:
            raise ConfigError(f"material {name!r}: negative k")
    return out


def resolve(
    materials: dict[str, Material], name: str, wavelength_nm: float, allow_placeholder: bool = False
) -> complex:
    try:
        mat = materials[name]
    except KeyError:
        raise ConfigError(f"unknown material {name!r}") from None
    if mat.placeholder and not allow_placeholder:
        raise ConfigError(
            f"material {name!r} is a placeholder entry ({mat.note or 'unconfirmed'}); "
            "supply a confirmed value or allow placeholders explicitly"
        )
    if abs(mat.wavelength_nm - wavelength_nm) > WAVELENGTH_TOL_NM:
        raise ConfigError(
            f"material {name!r} is tabulated at {mat.wavelength_nm} nm, not {wavelength_nm} nm"
        )
    return mat.index


def _layer_fields(entry, materials, wavelength_nm, allow_placeholder, free_ok):
    if not isinstance(entry, dict) or "thickness_nm" not in entry:
        raise ConfigError(f"layer entry needs thickness_nm: {entry!r}")

    def value(v, what):
        if isinstance(v, str):
            if not free_ok:
                raise ConfigError(f"free parameter {v!r} not allowed in a fixed stack")
            return Param(v)
        try:
            return float(v)
        except (TypeError, ValueError):
            raise ConfigError(f"bad {what} value {v!r}") from None

    thickness = value(entry["thickness_nm"], "thickness_nm")
    if "material" in entry:
        if materials is None:
            raise ConfigError("stack references a material but no materials table was given")
        idx = resolve(materials, entry["material"], wavelength_nm, allow_placeholder)
        n, k = idx.real, idx.imag
        name = entry["material"]
    else:
        if "n" not in entry:
            raise ConfigError(f"layer needs either material or n: {entry!r}")
        n = value(entry["n"], "n")
        k = value(entry.get("k", 0.0), "k")
        name = entry.get("name", "")
    return thickness, n, k, name


def parse_stack(
    spec, wavelength_nm: float, materials=None, allow_placeholder: bool = False
) -> LayerStack:
    ambient_in = ambient_out = 1.0
    if isinstance(spec, dict):
        ambient_in = float(spec.get("ambient_in", 1.0))
        ambient_out = float(spec.get("ambient_out", 1.0))
        spec = spec.get("layers")
    if not isinstance(spec, list):
        raise ConfigError("stack description must be a JSON list of layers")
    layers = []
    for entry in spec:
        d, n, k, name = _layer_fields(entry, materials, wavelength_nm, allow_placeholder, free_ok=False)
        layers.append(Layer(d, complex(n, k), name))
    return LayerStack(tuple(layers), wavelength_nm, ambient_in, ambient_out)


def parse_template(
    spec, wavelength_nm: float, materials=None, allow_placeholder: bool = False
) -> StackTemplate:
    bounds = {}
    ambient_in = ambient_out = 1.0
    if isinstance(spec, dict):
        bounds = {k: tuple(map(float, v)) for k, v in spec.get("bounds", {}).items()}
        ambient_in = float(spec.get("ambient_in", 1.0))
        ambient_out = float(spec.get("ambient_out", 1.0))
        spec = spec.get("layers")
    if not isinstance(spec, list):
        raise ConfigError("template must be a list of layers or an object with 'layers'")
    layers = [
        LayerTemplate(*_layer_fields(e, materials, wavelength_nm, allow_placeholder, free_ok=True))
        for e in spec
    ]
    return StackTemplate(tuple(layers), bounds, wavelength_nm, ambient_in, ambient_out)


def load_stack(path, wavelength_nm: float, materials=None, allow_placeholder: bool = False) -> LayerStack:
    return parse_stack(_read_json(path), wavelength_nm, materials, allow_placeholder)


def load_template(path, wavelength_nm: float, materials=None, allow_placeholder: bool = False) -> StackTemplate:
    return parse_template(_read_json(path), wavelength_nm, materials, allow_placeholder)
