"""Batch front end: JSON run configs, seeded execution, persisted records.

Every invocation creates a fresh numbered run directory under the output
root and writes a ``record.json`` (full config echo, version, wall clock),
a ``results.jsonl`` stream, and per-command CSV plot data.  Exit codes:
0 success / all verifications pass, 1 verification failure or unusable
estimate, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import subprocess
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np

from .brownian import brownian_om_check
from .conformal import Mobius, Quadratic, map_from_config, push_curve
from .errors import ConfigError, EstimateError, LooplabError
from .geometry import AnnularRegion, JordanCurve, circle, load_curve
from .identities import (
    OMConfig,
    om_empirical_83,
    om_prediction,
    verify_continuity,
    verify_divergence_lemma,
    verify_energy_variation,
    verify_mass_identity,
    verify_restriction_lemma,
)
from .lattice import (
    domain_from_spec,
    hitting_mass,
    loop_mass,
    sample_soup,
    werner_mass,
)
from .lattice.lambda_star import lambda_star
from .loewner import liouville_action, riemann_maps, rooted_loop_energy

COMMANDS = ("energy", "mass", "lambda-star", "werner", "soup",
            "verify", "om", "brownian-om")


# --------------------------------------------------------------------------
# spec parsing


def curve_from_config(spec: Any) -> JordanCurve:
    """Curve from a config record or a shorthand string.

    Strings: ``circle``, ``circle:<radius>``, or a path to a saved-curve
    CSV.  Records: ``{"variant": "circle"|"cosine"|"file"|"image", ...}``.
    """
    if isinstance(spec, str):
        if spec == "circle":
            return circle(0j, 1.0, 1024)
        if spec.startswith("circle:"):
            return circle(0j, float(spec.split(":", 1)[1]), 1024)
        return load_curve(spec)
    if not isinstance(spec, dict) or "variant" not in spec:
        raise ConfigError("curve spec needs a 'variant' field")
    variant = spec["variant"]
    n = int(spec.get("n", 1024))
    if variant == "circle":
        c = spec.get("center", [0.0, 0.0])
        return circle(complex(c[0], c[1]), float(spec.get("radius", 1.0)), n)
    if variant == "cosine":
        theta = 2.0 * np.pi * np.arange(n) / n
        rho = float(spec.get("radius", 1.0)) * (
            1.0 + float(spec["amplitude"]) * np.cos(int(spec["mode"]) * theta))
        if np.any(rho <= 0.0):
            raise ConfigError("cosine perturbation must keep a positive radius")
        return JordanCurve(rho * np.exp(1j * theta), True, 0)
    if variant == "file":
        return load_curve(spec["path"])
    if variant == "image":
        base = curve_from_config(spec["base"])
        return push_curve(map_from_config(spec["map"]), base)
    raise ConfigError(f"unknown curve variant {variant!r}")


def _map_shorthand(text: str):
    """CLI map shorthand: ``quadratic:<c>`` or ``mobius[:a,b,c,d]``."""
    kind, _, rest = text.partition(":")
    if kind == "quadratic":
        return Quadratic(None, complex(float(rest)))
    if kind == "mobius":
        if not rest:
            return Mobius()
        a, b, c, d = (complex(float(v)) for v in rest.split(","))
        return Mobius(None, a, b, c, d)
    raise ConfigError(f"unknown map shorthand {text!r}")


def _parse_mesh(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _with_domain_r(f, r: float):
    return dataclasses.replace(f, domain_r=r) if f.domain_r is None else f


# --------------------------------------------------------------------------
# run records


@dataclasses.dataclass
class RunRecord:
    """Everything needed to audit or reproduce one CLI invocation."""

    command: str
    config: dict
    seed: int
    threads: int
    version: str
    wall_clock: float
    results: list[dict]

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)


def _version_string() -> str:
    from . import __version__
    try:
        desc = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).parent).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        desc = ""
    return f"looplab {__version__}" + (f" ({desc})" if desc else "")


def _run_dir(root: Path, command: str) -> Path:
    """Next free numbered directory; existing runs are never touched."""
    root.mkdir(parents=True, exist_ok=True)
    n = 0
    while True:
        candidate = root / f"{command}-{n:04d}"
        try:
            candidate.mkdir()
            return candidate
        except FileExistsError:
            n += 1


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# --------------------------------------------------------------------------
# command handlers: each returns (results, csv spec or None, exit code)


def _cmd_energy(cfg: dict, args) -> tuple[list[dict], tuple | None, int]:
    curve = curve_from_config(cfg["curve"])
    rooted = rooted_loop_energy(curve)
    disk = liouville_action(riemann_maps(curve))
    results = [
        {"route": rooted.route, "value": rooted.value,
         "error": rooted.error_estimate},
        {"route": disk.route, "value": disk.value,
         "error": disk.error_estimate},
    ]
    rows = [[r["route"], r["value"], r["error"]] for r in results]
    return results, ("energy.csv", ["route", "value", "error"], rows), 0


def _cmd_mass(cfg: dict, args) -> tuple[list[dict], tuple | None, int]:
    h = float(cfg.get("mesh", 1 / 16))
    domain = domain_from_spec(cfg["domain"], h)
    if "v1" in cfg:
        v1 = domain_from_spec(cfg["v1"], h)
        v2 = domain_from_spec(cfg["v2"], h)
        value = hitting_mass(v1, v2, domain)
        kind = "hitting"
    else:
        value = loop_mass(domain)
        kind = "loop"
    results = [{"kind": kind, "mesh": h, "value": value.value,
                "stderr": value.stderr}]
    return results, None, 0


def _cmd_lambda_star(cfg: dict, args) -> tuple[list[dict], tuple | None, int]:
    est = lambda_star(
        cfg["v1"], cfg["v2"],
        R_schedule=cfg.get("radii", (4.0, 8.0, 16.0, 32.0)),
        mesh_schedule=cfg.get("meshes", (1 / 8, 1 / 16)),
        relative_radii=bool(cfg.get("relative_radii", True)),
    )
    rows = [list(row) for row in est.table]
    return ([est.to_record()],
            ("lambda_star.csv", ["mesh", "R", "mass", "renormalized"], rows),
            0)


def _cmd_werner(cfg: dict, args) -> tuple[list[dict], tuple | None, int]:
    h = float(cfg.get("mesh", 1 / 16))
    domain = domain_from_spec(cfg["domain"], h)
    v1 = domain_from_spec(cfg["v1"], h)
    v2 = domain_from_spec(cfg["v2"], h)
    value = werner_mass(v1, v2, domain, int(cfg.get("replicas", 2000)),
                        args.seed, args.threads)
    results = [{"mesh": h, "replicas": int(cfg.get("replicas", 2000)),
                "value": value.value, "stderr": value.stderr}]
    return results, None, 0


def _cmd_soup(cfg: dict, args) -> tuple[list[dict], tuple | None, int]:
    h = float(cfg.get("mesh", 1 / 16))
    domain = domain_from_spec(cfg["domain"], h)
    replicas = int(cfg.get("replicas", 1000))
    counts = [sample_soup(domain, args.seed, k).loop_count
              for k in range(replicas)]
    counts = np.asarray(counts, dtype=float)
    exact = loop_mass(domain)
    stderr = float(counts.std(ddof=1) / np.sqrt(replicas))
    results = [{
        "mesh": h, "replicas": replicas,
        "mean_count": float(counts.mean()), "stderr": stderr,
        "exact_mass": exact.value,
        "z": (float(counts.mean()) - exact.value) / stderr,
    }]
    rows = [[k, int(c)] for k, c in enumerate(counts)]
    return results, ("soup_counts.csv", ["replica", "count"], rows), 0


def _cmd_verify(cfg: dict, args) -> tuple[list[dict], tuple | None, int]:
    identity = cfg.get("identity")
    r = float(cfg.get("r", 0.5))
    if identity == "restriction":
        report = verify_restriction_lemma(
            cfg["k"], cfg["dprime"], cfg["d"],
            mesh_schedule=cfg.get("meshes", (1 / 16, 1 / 32)),
            truncation_radius=float(cfg.get("truncation_radius", 4.0)),
        )
        reports = [report]
    elif identity == "divergence":
        reports = list(verify_divergence_lemma(
            cfg["k"],
            shrink_stages=int(cfg.get("stages", 4)),
            h=float(cfg.get("mesh", 1 / 32)),
            replicas=int(cfg.get("replicas", 1200)),
            seed=args.seed, threads=args.threads,
        ))
    elif identity == "mass":
        reports = [verify_mass_identity(
            curve_from_config(cfg.get("curve", "circle")), r,
            _with_domain_r(map_from_config(cfg["map"]), r),
            form=cfg.get("form", "solid"),
            h=float(cfg.get("mesh", 1 / 16)),
            replicas=int(cfg.get("replicas", 2000)),
            seed=args.seed, threads=args.threads,
        )]
    elif identity == "energy":
        reports = [verify_energy_variation(
            curve_from_config(cfg.get("curve", "circle")), r,
            _with_domain_r(map_from_config(cfg["map"]), r),
            mesh_schedule=cfg.get("meshes", (1 / 8, 1 / 16)),
            replicas=int(cfg.get("replicas", 2000)),
            seed=args.seed, threads=args.threads,
        )]
    elif identity == "continuity":
        f = cfg.get("map")
        reports = [verify_continuity(
            r, _with_domain_r(map_from_config(f), r) if f else None,
            eps_schedule=tuple(cfg.get("eps_schedule", (0.2, 0.05))),
            replicas=int(cfg.get("replicas", 1500)),
            seed=args.seed, threads=args.threads,
        )]
    else:
        raise ConfigError(f"unknown identity {identity!r}")
    results = [rep.to_record() for rep in reports]
    if not args.quiet:
        for rep in reports:
            print(rep.summary())
    code = 0 if all(rep.verdict == "pass" for rep in reports) else 1
    return results, None, code


def _cmd_om(cfg: dict, args) -> tuple[list[dict], tuple | None, int]:
    r = float(cfg.get("r", 0.5))
    f = _with_domain_r(map_from_config(cfg["map"]), r)
    base = curve_from_config(cfg.get("base_curve", {"variant": "circle", "n": 512}))
    config = OMConfig(
        kappa=float(cfg["kappa"]),
        curve=push_curve(f, base),
        region=AnnularRegion(r),
        map=f,
        eps_schedule=tuple(cfg.get("eps_schedule", (0.2, 0.1, 0.05))),
    )
    pred = om_prediction(config, replicas=int(cfg.get("replicas", 0)),
                         seed=args.seed, threads=args.threads)
    results = [{"prediction": pred.value, "energy": pred.energy,
                "charge": pred.charge}]
    code = 0
    if pred.consistency is not None:
        results.append(pred.consistency.to_record())
        code = 0 if pred.consistency.verdict == "pass" else 1
    if cfg.get("empirical", False):
        report = om_empirical_83(config,
                                 replicas=int(cfg.get("replicas", 2000)),
                                 seed=args.seed)
        results.append(report.to_record())
        code = max(code, 0 if report.verdict == "pass" else 1)
    return results, None, code


def _cmd_brownian_om(cfg: dict, args) -> tuple[list[dict], tuple | None, int]:
    report = brownian_om_check(
        np.asarray(cfg["phi"], dtype=float),
        float(cfg.get("kappa", 1.0)),
        eps_schedule=tuple(cfg.get("eps_schedule", (0.4, 0.3, 0.2))),
        sample_count=int(cfg.get("samples", 100_000)),
        seed=args.seed,
    )
    if not args.quiet:
        print(report.summary())
    rows = [[eps, ratio, err] for eps, ratio, err in zip(
        report.provenance["eps_schedule"], report.details["ratios"],
        report.details["ratio_stderr"])]
    return ([report.to_record()],
            ("tube_ratios.csv", ["eps", "ratio", "stderr"], rows),
            0 if report.verdict == "pass" else 1)


_HANDLERS = {
    "energy": _cmd_energy,
    "mass": _cmd_mass,
    "lambda-star": _cmd_lambda_star,
    "werner": _cmd_werner,
    "soup": _cmd_soup,
    "verify": _cmd_verify,
    "om": _cmd_om,
    "brownian-om": _cmd_brownian_om,
}


# --------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="looplab",
        description="Loop-energy and loop-measure batch runner")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON run configuration file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int,
                        default=os.cpu_count() or 1)
    parser.add_argument("--out", default=None,
                        help="output root (default $LOOPLAB_OUT or ./runs)")
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--identity", help="shorthand for verify")
    parser.add_argument("--map", dest="map_text",
                        help="shorthand map, e.g. quadratic:0.2")
    parser.add_argument("--mesh", help="shorthand mesh, e.g. 1/64")
    parser.add_argument("--curve", help="shorthand curve, e.g. circle or a CSV path")
    return parser


def _merge_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{args.config}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("run config must be a JSON object")
    if args.identity:
        cfg["identity"] = args.identity
    if args.map_text:
        m = _map_shorthand(args.map_text)
        if isinstance(m, Quadratic):
            cfg["map"] = {"variant": "quadratic", "c": [m.c.real, m.c.imag]}
        else:
            cfg["map"] = {"variant": "mobius",
                          "coeffs": [[z.real, z.imag]
                                     for z in (m.a, m.b, m.c, m.d)]}
    if args.mesh:
        cfg["mesh"] = _parse_mesh(args.mesh)
    if args.curve:
        cfg["curve"] = args.curve
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    start = time.monotonic()
    try:
        cfg = _merge_config(args)
        results, csv_spec, code = _HANDLERS[args.command](cfg, args)
    except (ConfigError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"looplab: config error: {exc}", file=sys.stderr)
        return 2
    except EstimateError as exc:
        print(f"looplab: estimate unusable: {exc}", file=sys.stderr)
        return 1
    except LooplabError as exc:
        print(f"looplab: {exc}", file=sys.stderr)
        return 1

    record = RunRecord(
        command=args.command,
        config=cfg,
        seed=args.seed,
        threads=args.threads,
        version=_version_string(),
        wall_clock=time.monotonic() - start,
        results=results,
    )
    out_root = Path(args.out or os.environ.get("LOOPLAB_OUT", "runs"))
    run_dir = _run_dir(out_root, args.command)
    (run_dir / "record.json").write_text(record.to_json(), encoding="utf-8")
    with open(run_dir / "results.jsonl", "w", encoding="utf-8") as fh:
        for item in results:
            fh.write(json.dumps(item, sort_keys=True) + "\n")
    if csv_spec is not None:
        name, header, rows = csv_spec
        _write_csv(run_dir / name, header, rows)
    if not args.quiet:
        print(f"run directory: {run_dir}")
    return code


if __name__ == "__main__":
    sys.exit(main())
