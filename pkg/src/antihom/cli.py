"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 physics/model error.
Every command writes its outputs plus a ``*.manifest.json`` that
``antihom rerun`` replays bit-identically.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, FitError, PhysicsError
from .experiment import (
    ScanConfig,
    bell_test,
    classify_extremum,
    hom_scan,
    pair_output,
    polarization_scan,
)
from .fitting import fit_hom_curve
from .fock import (
    FockState,
    ModeRegister,
    dilate,
    dilated_ports,
    distribution,
    evolve,
    extend_internal,
    check_passive,
    is_unitary,
    port_distribution,
)
from .materials import load_materials, load_stack, load_template
from .optics import (
    BeamsplitterSpec,
    Layer,
    LayerStack,
    design_stack,
    lossless_bs,
    lossy_bs,
    qsw_composite,
    stack_response,
)
from .output import atomic_write, csv_text, dumps, scan_csv, scan_json
from .states import WavePacketSpec

SAMPLES = ("identity", "lossless50", "sin100nm", "lossy-eq6-plus", "lossy-eq6-minus", "qsw")
TARGETS = {
    "eq6-plus": BeamsplitterSpec(0.5, 0.5),
    "eq6-minus": BeamsplitterSpec(0.5, -0.5),
    "identity": BeamsplitterSpec(1.0, 0.0),
    "lossless50": BeamsplitterSpec(math.sqrt(0.5), 1j * math.sqrt(0.5)),
}

# hard defaults; a --config file overrides these, explicit flags override both
DEFAULTS = {
    "hom-scan": {
        "phi": "0", "sample": "lossless50", "sc": "0", "ss": "1", "sample_file": None,
        "materials": None, "allow_placeholder": False, "wavelength": 810.0, "bandwidth": 10.0,
        "positions": "-60:60:2", "reference_counts": 750.0, "noise": False, "mixing": 0.0,
        "seed": 0, "out": "hom_scan.csv", "json": None,
    },
    "distribution": {
        "phi": "0", "sample": "lossless50", "sc": "0", "ss": "1", "sample_file": None,
        "materials": None, "allow_placeholder": False, "wavelength": 810.0, "overlap": 1.0,
        "seed": 0, "out": "distribution.csv", "json": None,
    },
    "bell-scan": {
        "phi": "0", "mixing": 0.0, "noise_model": "white", "points": 37,
        "seed": 0, "out": "bell_scan.csv", "json": None,
    },
    "stack-response": {
        "file": None, "wavelength": 810.0, "materials": None, "allow_placeholder": False,
        "seed": 0, "out": "stack_response.json",
    },
    "stack-design": {
        "template": None, "target": "eq6-plus", "wavelength": 810.0, "materials": None,
        "allow_placeholder": False, "starts": 5, "seed": 0, "out": "stack_design.json",
    },
    "fock": {
        "matrix": None, "occupation": None, "seed": 0, "out": "fock.csv", "json": None,
    },
}

_OPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.USub: operator.neg, ast.UAdd: operator.pos,
}


def parse_angle(text) -> float:
    """Evaluate a small arithmetic expression that may use ``pi``."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError
    try:
        return ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse angle {text!r}") from None


def parse_complex(text) -> complex:
    if isinstance(text, (int, float)):
        return complex(text)
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def parse_positions(text) -> list[float]:
    if isinstance(text, list):
        return [float(x) for x in text]
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + i * step for i in range(n)]
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"bad positions {text!r}; use start:stop:step or a comma list") from None


def build_sample(cfg: dict):
    """Resolve a sample preset or stack file into a matrix or LayerStack."""
    if cfg.get("sample_file"):
        mats = load_materials(cfg.get("materials"))
        return load_stack(cfg["sample_file"], float(cfg["wavelength"]), mats, bool(cfg["allow_placeholder"]))
    name = cfg["sample"]
    if name == "identity":
        return np.eye(2, dtype=complex)
    if name == "lossless50":
        return lossless_bs(math.sqrt(0.5))
    if name == "sin100nm":
        return LayerStack((Layer(100.0, 2.1, "SiN"),), float(cfg["wavelength"]))
    if name == "lossy-eq6-plus":
        return lossy_bs(+1)
    if name == "lossy-eq6-minus":
        return lossy_bs(-1)
    if name == "qsw":
        return qsw_composite((parse_complex(cfg["sc"]), parse_complex(cfg["ss"])))
    raise ConfigError(f"unknown sample {name!r}; choose from {', '.join(SAMPLES)}")


def _json_path(cfg: dict) -> Path:
    return Path(cfg["json"]) if cfg.get("json") else Path(cfg["out"]).with_suffix(".json")


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.stem + ".manifest.json")


def _echo(cfg: dict) -> dict:
    """Config without output paths, so content does not depend on where it is written."""
    return {k: v for k, v in sorted(cfg.items()) if k not in ("out", "json")}


# -- commands ---------------------------------------------------------------


def cmd_hom_scan(cfg: dict) -> dict:
    packet = WavePacketSpec(float(cfg["wavelength"]), float(cfg["bandwidth"]))
    config = ScanConfig(
        positions=parse_positions(cfg["positions"]),
        phi=parse_angle(cfg["phi"]),
        sample=build_sample(cfg),
        packet=packet,
        reference_counts=float(cfg["reference_counts"]),
        rng_seed=int(cfg["seed"]),
        noise=bool(cfg["noise"]),
        mixing=float(cfg["mixing"]),
    )
    result = hom_scan(config)
    fit = None
    if len(result) >= 8:
        try:
            f = fit_hom_curve(result)
            fit = {
                "baseline": f.baseline, "amplitude": f.amplitude, "center_um": f.center,
                "width_um": f.width, "extremum": f.extremum, "success": f.success, "flat": f.flat,
            }
            if f.success and not f.flat:
                kind = "dip" if f.amplitude < 0 else "peak"
                fit["kind"] = kind
                fit["regime"] = classify_extremum(f.extremum, kind)
        except FitError as exc:
            fit = {"success": False, "error": str(exc)}
    out = Path(cfg["out"])
    jpath = _json_path(cfg)
    atomic_write(out, scan_csv(result))
    atomic_write(jpath, scan_json(result, _echo(cfg), fit))
    print(f"points={len(result)} baseline_probability={result.baseline_probability!r} "
          f"min_normalized={min(result.normalized)!r} max_normalized={max(result.normalized)!r}")
    return {"csv": str(out), "json": str(jpath)}


def cmd_distribution(cfg: dict) -> dict:
    g = float(cfg["overlap"])
    dist = pair_output(parse_angle(cfg["phi"]), build_sample(cfg), g)
    loss_ports = [p for p in dist.register.ports if p.startswith("loss")]
    table = port_distribution(dist, ["L", "R", loss_ports])
    header = ("n_gamma", "n_delta", "n_loss", "probability")
    rows = [(*k, p) for k, p in table.items()]
    out = Path(cfg["out"])
    jpath = _json_path(cfg)
    atomic_write(out, csv_text(header, rows))
    atomic_write(jpath, dumps({"columns": list(header), "rows": [dict(zip(header, r)) for r in rows],
                               "config": _echo(cfg)}))
    for r in rows:
        print(f"N_gamma={r[0]} N_delta={r[1]} N_loss={r[2]} p={r[3]:.12g}")
    return {"csv": str(out), "json": str(jpath)}


def cmd_bell_scan(cfg: dict) -> dict:
    phi = parse_angle(cfg["phi"])
    mixing = float(cfg["mixing"])
    noise = cfg["noise_model"]
    grid = np.linspace(0.0, math.pi, int(cfg["points"]))
    header = ("theta2_rad", "theta1_rad", "probability")
    rows = []
    for theta2 in (0.0, math.pi / 4, -math.pi / 4, math.pi / 2):
        curve = polarization_scan(phi, theta2, grid, mixing, noise)
        rows += [(theta2, t1, p) for t1, p in zip(grid, curve)]
    res = bell_test(phi, mixing, noise, grid)
    out = Path(cfg["out"])
    jpath = _json_path(cfg)
    atomic_write(out, csv_text(header, rows))
    atomic_write(jpath, dumps({"V1": res.V1, "V2": res.V2, "S": res.S, "nonclassical": res.nonclassical,
                               "columns": list(header), "config": _echo(cfg)}))
    print(f"V1={res.V1!r} V2={res.V2!r} S={res.S!r} nonclassical={res.nonclassical}")
    return {"csv": str(out), "json": str(jpath)}


def _response_dict(resp) -> dict:
    return {"t": resp.t, "r_left": resp.r_left, "r_right": resp.r_right, "T": resp.T,
            "R_left": resp.R_left, "R_right": resp.R_right, "A_left": resp.A_left, "A_right": resp.A_right}


def cmd_stack_response(cfg: dict) -> dict:
    if not cfg.get("file"):
        raise ConfigError("stack response needs --file")
    mats = load_materials(cfg.get("materials"))
    stack = load_stack(cfg["file"], float(cfg["wavelength"]), mats, bool(cfg["allow_placeholder"]))
    resp = stack_response(stack)
    out = Path(cfg["out"])
    atomic_write(out, dumps({"response": _response_dict(resp), "config": _echo(cfg)}))
    print(f"T={resp.T!r} R={resp.R_left!r} A={resp.A_left!r}")
    return {"json": str(out)}


def cmd_stack_design(cfg: dict) -> dict:
    if not cfg.get("template"):
        raise ConfigError("stack design needs --template")
    try:
        target = TARGETS[cfg["target"]]
    except KeyError:
        raise ConfigError(f"unknown target {cfg['target']!r}; choose from {', '.join(TARGETS)}") from None
    mats = load_materials(cfg.get("materials"))
    template = load_template(cfg["template"], float(cfg["wavelength"]), mats, bool(cfg["allow_placeholder"]))
    res = design_stack(template, target, int(cfg["starts"]))
    layers = [{"name": lay.name, "thickness_nm": lay.thickness_nm, "n": lay.index.real, "k": lay.index.imag}
              for lay in res.stack.layers]
    out = Path(cfg["out"])
    atomic_write(out, dumps({"params": res.params, "residual": res.residual, "global_phase": res.global_phase,
                             "layers": layers, "response": _response_dict(res.response), "config": _echo(cfg)}))
    print(f"residual={res.residual!r} params={res.params}")
    return {"json": str(out)}


def _load_matrix(path) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if isinstance(raw, dict):
        raw = raw.get("matrix")
    try:
        M = np.array([[parse_complex(v) for v in row] for row in raw], dtype=complex)
    except TypeError:
        raise ConfigError("matrix file must hold a list of rows") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ConfigError(f"matrix must be square, got shape {M.shape}")
    return M


def cmd_fock(cfg: dict) -> dict:
    if not cfg.get("matrix") or cfg.get("occupation") is None:
        raise ConfigError("fock needs --matrix and --occupation")
    M = check_passive(_load_matrix(cfg["matrix"]))
    m = M.shape[0]
    try:
        occ = tuple(int(x) for x in str(cfg["occupation"]).split(","))
    except ValueError:
        raise ConfigError(f"bad occupation {cfg['occupation']!r}") from None
    if len(occ) != m:
        raise ConfigError(f"occupation has {len(occ)} entries for a {m}-mode matrix")
    ports = tuple(f"m{i}" for i in range(m))
    if not is_unitary(M):
        ports, M = dilated_ports(ports), dilate(M)
        occ = occ + (0,) * m
    reg = ModeRegister.product(ports, ("H",), (0,))
    state = FockState(reg, {occ: 1.0})
    out_state = evolve(state, extend_internal(M, ports, reg))
    dist = distribution(out_state)
    header = (*ports, "amplitude_re", "amplitude_im", "probability")
    rows = [(*k, a.real, a.imag, dist.probs[k]) for k, a in out_state.terms.items()]
    out = Path(cfg["out"])
    jpath = _json_path(cfg)
    atomic_write(out, csv_text(header, rows))
    atomic_write(jpath, dumps({"columns": list(header), "rows": [dict(zip(header, r)) for r in rows],
                               "config": _echo(cfg)}))
    return {"csv": str(out), "json": str(jpath)}


COMMANDS = {
    "hom-scan": cmd_hom_scan,
    "distribution": cmd_distribution,
    "bell-scan": cmd_bell_scan,
    "stack-response": cmd_stack_response,
    "stack-design": cmd_stack_design,
    "fock": cmd_fock,
}


# -- argument handling ------------------------------------------------------


def _add_common(p, json_out=True):
    p.add_argument("--config", help="JSON file of option values (explicit flags win)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--out", help="main output file")
    if json_out:
        p.add_argument("--json", help="JSON output path (default: --out with .json suffix)")


def _add_sample(p):
    p.add_argument("--phi", help="Bell phase, e.g. 0, pi, pi/2")
    p.add_argument("--sample", help=f"preset: {', '.join(SAMPLES)}")
    p.add_argument("--sc", help="cosine standing-wave survival amplitude (qsw preset)")
    p.add_argument("--ss", help="sine standing-wave survival amplitude (qsw preset)")
    p.add_argument("--sample-file", help="JSON stack file instead of a preset")
    p.add_argument("--materials", help="materials JSON (default: bundled table)")
    p.add_argument("--allow-placeholder", action="store_true", default=None,
                   help="accept materials flagged as placeholders")
    p.add_argument("--wavelength", type=float, help="wavelength in nm (default 810)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antihom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"antihom {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hom-scan", help="coincidence vs sample position")
    _add_sample(p)
    p.add_argument("--bandwidth", type=float, help="filter FWHM in nm (default 10)")
    p.add_argument("--positions", help="start:stop:step in um or comma list (default -60:60:2)")
    p.add_argument("--reference-counts", type=float, help="mean counts at the no-overlap level")
    p.add_argument("--noise", action="store_true", default=None, help="synthesize Poisson counts")
    p.add_argument("--mixing", type=float, help="weight of unentangled pairs in the source")
    _add_common(p)

    p = sub.add_parser("distribution", help="output photon-number table (N_gamma, N_delta, N_loss)")
    _add_sample(p)
    p.add_argument("--overlap", type=float, help="temporal overlap g in [0, 1] (default 1)")
    _add_common(p)

    p = sub.add_parser("bell-scan", help="polarization correlations and Bell parameter")
    p.add_argument("--phi", help="Bell phase")
    p.add_argument("--mixing", type=float, help="noise weight in [0, 1]")
    p.add_argument("--noise-model", choices=("white", "product"))
    p.add_argument("--points", type=int, help="analyzer angles per curve (default 37)")
    _add_common(p)

    p = sub.add_parser("stack", help="thin-film response or design")
    stack_sub = p.add_subparsers(dest="stack_command", required=True)
    q = stack_sub.add_parser("response", help="t, r, absorption of a stack file")
    q.add_argument("--file", help="JSON stack description")
    q.add_argument("--wavelength", type=float)
    q.add_argument("--materials")
    q.add_argument("--allow-placeholder", action="store_true", default=None)
    _add_common(q, json_out=False)
    q = stack_sub.add_parser("design", help="fit template parameters to a target splitter")
    q.add_argument("--template", help="JSON template with free parameters and bounds")
    q.add_argument("--target", help=f"one of {', '.join(TARGETS)}")
    q.add_argument("--wavelength", type=float)
    q.add_argument("--materials")
    q.add_argument("--allow-placeholder", action="store_true", default=None)
    q.add_argument("--starts", type=int, help="optimizer restarts (default 5)")
    _add_common(q, json_out=False)

    p = sub.add_parser("fock", help="evolve an occupation through a matrix file")
    p.add_argument("--matrix", help="JSON list of rows; entries numbers or strings like '0.5+0.5j'")
    p.add_argument("--occupation", help="comma-separated photon numbers, e.g. 1,1")
    _add_common(p)

    p = sub.add_parser("rerun", help="replay a run manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="write the main output here instead of the recorded path")
    return parser


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[command])
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(overrides, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(overrides) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(overrides)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def run(command: str, cfg: dict) -> dict:
    outputs = COMMANDS[command](cfg)
    manifest = {
        "command": command,
        "config": cfg,
        "seed": cfg.get("seed", 0),
        "version": __version__,
        "outputs": outputs,
    }
    mpath = _manifest_path(Path(cfg["out"]))
    atomic_write(mpath, dumps(manifest))
    outputs["manifest"] = str(mpath)
    return outputs


def _rerun(args) -> dict:
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
        command, cfg = manifest["command"], dict(manifest["config"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ConfigError(f"cannot read manifest {args.manifest}: {exc}") from None
    if command not in COMMANDS:
        raise ConfigError(f"manifest names unknown command {command!r}")
    if args.out:
        cfg["out"] = args.out
        if "json" in cfg:
            cfg["json"] = None
    return run(command, cfg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rerun":
            _rerun(args)
            return 0
        command = args.command if args.command != "stack" else f"stack-{args.stack_command}"
        run(command, resolve_config(command, args))
    except ConfigError as exc:
        print(f"antihom: error: {exc}", file=sys.stderr)
        return 2
    except PhysicsError as exc:
        print(f"antihom: physics error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
