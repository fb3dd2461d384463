"""Command-line front end: ``qvoronoi {diagram,capacity,verify,sample}``.

Configuration precedence: built-in defaults < ``--config`` JSON file < flags.
Exit codes: 0 success, 1 verification failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, QVoronoiError

log = logging.getLogger("qvoronoi")

DEFAULTS = {
    "d": 5,
    "example": 1,
    "sites": None,
    "random_sites": None,
    "kind": "divergence,euclidean",
    "n": 20000,
    "r": 0.9999,
    "seed": 0,
    "scheme": "fibonacci",
    "out": "out",
    "resolution": [180, 361],
    "svg_resolution": 220,
    "boundary_tol": 1e-7,
}


class UsageError(ConfigError):
    pass


def _parse_list(text, cast=float):
    if text is None or isinstance(text, list):
        return text
    return [cast(x) for x in str(text).split(",") if x.strip()]


def load_config(args, defaults: dict) -> dict:
    cfg = dict(defaults)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        except OSError as exc:
            raise UsageError(str(exc)) from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        cfg.update(data)
    for key, value in vars(args).items():
        if key in ("config", "command", "func", "verbose") or value is None:
            continue
        cfg[key] = value
    return cfg


# diagram -------------------------------------------------------------------
def _diagram_sites(cfg):
    from .section import example_sites, triples_to_xi
    from .voronoi import from_sphere

    d = int(cfg["d"])
    if d < 2:
        raise UsageError("d must be >= 2")
    if cfg.get("sites"):
        sites = np.asarray(cfg["sites"], dtype=float)
        if sites.ndim != 2 or sites.shape[1] != 3:
            raise UsageError("sites must be a list of 3-vectors")
        if d == 2:
            return from_sphere(sites / np.linalg.norm(sites, axis=1, keepdims=True), 2)
        return triples_to_xi(d, sites)
    if cfg.get("random_sites"):
        rng = np.random.default_rng(cfg["seed"])
        u = rng.standard_normal((int(cfg["random_sites"]), 3))
        return from_sphere(u / np.linalg.norm(u, axis=1, keepdims=True), d)
    if d == 2:
        raise UsageError("d=2 needs explicit 'sites' or 'random_sites'")
    return triples_to_xi(d, example_sites(int(cfg["example"]), d))


def cmd_diagram(cfg) -> int:
    from .io import config_hash, write_csv, write_json
    from .plotting import render_diagram_svg
    from .voronoi import assign_cells, compare_diagrams, extract_boundary, parse_kind, pure_points, to_sphere

    d = int(cfg["d"])
    r = float(cfg["r"])
    if not 0.0 < r < 1.0:
        raise UsageError("r must lie in (0, 1)")
    if int(cfg["n"]) < 1:
        raise UsageError("n must be >= 1")
    kinds = [parse_kind(k, r) for k in _parse_list(cfg["kind"], str)]
    sites = _diagram_sites(cfg)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg)
    pts = pure_points(d, int(cfg["n"]), cfg["scheme"], cfg["seed"])
    coords = pts[:, [1, 2, 0]] if d == 2 else pts[:, [0, d - 1, d]]
    cols = ["x", "y", "z"] if d == 2 else ["xi_1", "xi_d", "xi_d+1"]
    assignments = {}
    for kind in kinds:
        a = assign_cells(pts, sites, kind, d, float(cfg["boundary_tol"]))
        assignments[kind.name] = a
        write_csv(out / f"assign_{kind.name}.csv", ["point", *cols, "site", "margin", "boundary"],
                  ([i, *coords[i], int(a.site[i]), float(a.margin[i]), int(a.boundary[i])] for i in range(len(a))),
                  chash)
        b = extract_boundary(sites, kind, d, tuple(cfg["resolution"]))
        rows = []
        for j, pl in enumerate(b.polylines):
            rows += [[j, v, pl.site_a, pl.site_b, int(pl.closed), *pl.coords[v]] for v in range(len(pl.coords))]
        write_csv(out / f"boundary_{kind.name}.csv", ["polyline", "vertex", "site_a", "site_b", "closed", *cols],
                  rows, chash)
        render_diagram_svg(out / f"diagram_{kind.name}.svg", sites, kind, d, b,
                           title=f"d={d}, {kind.name}", chash=chash, resolution=int(cfg["svg_resolution"]))
        log.info("%s: %d polylines, max vertex deviation %.2e rad", kind.name, len(b.polylines), b.max_deviation)
    report = {
        "d": d,
        "n": int(cfg["n"]),
        "seed": cfg["seed"],
        "r": r,
        "sites_sphere": to_sphere(sites, d).tolist(),
        "comparisons": [],
    }
    names = list(assignments)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            report["comparisons"].append(compare_diagrams(assignments[names[i]], assignments[names[j]]).to_dict())
    write_json(out / "compare.json", report, chash)
    for c in report["comparisons"]:
        verdict = "identical" if c["identical"] else f"differ on {c['n_disagree']} points ({c['disagreement_fraction']:.2%})"
        print(f"{c['kinds'][0]} vs {c['kinds'][1]}: {verdict}")
    return 0


# capacity ------------------------------------------------------------------
def cmd_capacity(cfg) -> int:
    from .capacity import QubitChannel, holevo_capacity_estimate
    from .io import config_hash, write_json
    from .seb import SEBConfig

    path = cfg.get("channel")
    if not path:
        raise UsageError("capacity needs a channel JSON file")
    try:
        ch = QubitChannel.from_json(path)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from exc
    n = int(cfg.get("n") or 2562)
    est = holevo_capacity_estimate(ch, n, cfg["scheme"], cfg["seed"], SEBConfig(tol=float(cfg.get("seb_tol", 1e-8))))
    report = {"channel": ch.to_dict(), **est.to_dict()}
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "capacity.json", report, config_hash(cfg))
    print(f"C = {est.value:.6f} nats ({est.bits:.6f} bits), n={n}, gap={est.gap:.1e}")
    return 0


# verify --------------------------------------------------------------------
def cmd_verify(cfg) -> int:
    from .io import config_hash, write_json
    from .verify import VerifyConfig, run_checks, summarize

    vc = dict(cfg)
    if cfg.get("section_dims") is not None:
        vc["section_dims"] = _parse_list(cfg["section_dims"], int)
    if cfg.get("eig_tol") is not None:
        vc["eig_tol"] = float(cfg["eig_tol"])
    vconf = VerifyConfig.from_dict(vc)
    only = _parse_list(cfg.get("only"), int)
    results = run_checks(vconf, only)
    for res in results:
        print("\n".join(res.lines()))
    summary = summarize(results)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "verify.json", summary, config_hash(cfg))
    return 0 if summary["passed"] else 1


# sample --------------------------------------------------------------------
def cmd_sample(cfg) -> int:
    from .bloch import sample_sphere
    from .io import config_hash, write_csv
    from .voronoi import from_sphere

    n, d = int(cfg["n"]), int(cfg.get("d") or 2)
    if n < 1:
        raise UsageError("n must be >= 1")
    u = sample_sphere(n, cfg["scheme"], cfg["seed"])
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    if d == 2:
        write_csv(out / "points.csv", ["x", "y", "z"], u, config_hash(cfg))
    else:
        xi = from_sphere(u, d)
        write_csv(out / "points.csv", [f"xi_{i + 1}" for i in range(d * d - 1)], xi, config_hash(cfg))
    print(f"wrote {n} points to {out / 'points.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qvoronoi", description="Voronoi diagrams of pure quantum states")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file overriding defaults")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    sp = sub.add_parser("diagram", help="cells, boundaries and SVGs for a site set")
    common(sp)
    sp.add_argument("--d", type=int)
    sp.add_argument("--example", type=int, choices=(1, 2, 3))
    sp.add_argument("--kind", help="comma list of divergence, euclidean, geodesic, hilbert-schmidt")
    sp.add_argument("--n", type=int, help="number of sampled pure points")
    sp.add_argument("--r", type=float, help="shrink radius for the divergence limit")
    sp.add_argument("--scheme", choices=("fibonacci", "uniform"))
    sp.set_defaults(func=cmd_diagram)

    sp = sub.add_parser("capacity", help="Holevo capacity estimate of a qubit channel")
    common(sp)
    sp.add_argument("channel", help='JSON file {"m": [9 reals], "b": [3 reals]}')
    sp.add_argument("--n", type=int)
    sp.add_argument("--scheme", choices=("fibonacci", "uniform"))
    sp.set_defaults(func=cmd_capacity)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    common(sp)
    sp.add_argument("--only", help="comma list of criterion numbers")
    sp.add_argument("--d", dest="section_dims", help="comma list of d for the section checks (each >= 3)")
    sp.add_argument("--eig-tol", type=float, help="tolerance for the eigenvalue equivalence")
    sp.add_argument("--r", type=float)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sample", help="write sampled sphere points as CSV")
    common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int, help="2 for Bloch vectors, >= 3 for section xi coordinates")
    sp.add_argument("--scheme", choices=("fibonacci", "uniform"))
    sp.set_defaults(func=cmd_sample)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    defaults = dict(DEFAULTS)
    if args.command == "capacity":
        defaults["n"] = 2562
    elif args.command == "sample":
        defaults.update(n=2562, d=2)
    elif args.command == "verify":
        defaults = {"out": DEFAULTS["out"]}
    try:
        cfg = load_config(args, defaults)
        return args.func(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QVoronoiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
