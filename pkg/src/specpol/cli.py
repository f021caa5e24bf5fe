"""Command-line front end: scenario runner and single-pipeline commands.

Exit codes: 1 usage, 2 parse error, 3 numerical failure, 4 failed scenario
check, 5 injection hypothesis violated, 6 window exhausted.

All data outputs are deterministic: fixed orderings, repr-formatted floats,
'.'-decimal CSV.  The run manifest lists every written file and a hash of the
canonical (sorted, compact) JSON serialization of the effective config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, classify as cls, essrange, galerkin, scenarios, truncation1d
from .errors import HypothesisViolated, NoConvergence, SpecpolError, WindowExhausted
from .linalg import ComplexMatrix
from .numrange import nr_boundary, region_from_support
from .operators import delay_block, ellipse_block, model_from_json

USAGE_ERROR, PARSE_ERROR, NUMERIC_ERROR, CHECK_ERROR, HYPOTHESIS_ERROR, WINDOW_ERROR = 1, 2, 3, 4, 5, 6


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _json_default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False,
                               default=_json_default) + "\n")


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _load_config(path: str | None, overrides) -> dict:
    config = {}
    if path:
        try:
            config = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise _ParseFailure(f"cannot read config {path}: {exc}") from exc
        if not isinstance(config, dict):
            raise _ParseFailure("config file must hold a JSON object")
    for item in overrides or []:
        if "=" not in item:
            raise _ParseFailure(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            config[key] = json.loads(raw)
        except json.JSONDecodeError:
            config[key] = raw  # plain string value
    return config


class _ParseFailure(Exception):
    pass


def _parse_matrix(args) -> ComplexMatrix:
    if args.builtin:
        kind, _, param = args.builtin.partition(":")
        if kind == "ellipse":
            return ellipse_block(int(param or 2))
        if kind == "delay":
            return delay_block(int(param or 1))
        if kind == "identity":
            return ComplexMatrix(np.eye(int(param or 3), dtype=complex))
        raise _ParseFailure(f"unknown builtin matrix {args.builtin!r}")
    try:
        raw = json.loads(Path(args.matrix).read_text())
        rows = [[complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in row] for row in raw]
        return ComplexMatrix.from_rows(rows)
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise _ParseFailure(f"cannot parse matrix: {exc}") from exc


def _clip_arg(text: str):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("clip expects re_min,re_max,im_min,im_max")
    return tuple(parts)


def _complex_arg(text: str) -> complex:
    re, _, im = text.partition(",")
    return complex(float(re), float(im or 0.0))


def cmd_numrange(args) -> int:
    M = _parse_matrix(args)
    sf = nr_boundary(M, args.angles)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [(float(t), float(s), float(z.real), float(z.imag))
            for t, s, z in zip(sf.angles, sf.support, sf.boundary_points)]
    write_csv(out / "boundary.csv", ("theta", "s", "re", "im"), rows)
    region = region_from_support(sf, args.clip)
    write_json(out / "region.json", region.to_json_dict())
    print(f"wrote {out / 'boundary.csv'} and {out / 'region.json'}")
    return 0


def cmd_essrange(args) -> int:
    op = model_from_json({"kind": args.model})
    sched = None
    if args.block_starts:
        starts = tuple(2 * int(b) - 1 for b in args.block_starts.split(","))
        sched = essrange.WindowSchedule(starts, 2 * args.block_width - 1, args.clip)
    est = essrange.estimate_essential_range(op, sched, clip=args.clip)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_json(out, est.to_json_dict())
    print(f"wrote {out} (empty={est.empty})")
    return 0


def cmd_galerkin(args) -> int:
    op = model_from_json({"kind": args.model})
    bases = [galerkin.SubspaceBasis.first_blocks(n) for n in range(1, args.n_max + 1)]
    run = galerkin.compress_sequence(op, bases)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out, ("n", "dim", "eig_index", "re", "im"), list(run.csv_rows()))
    print(f"wrote {out}")
    return 0


def cmd_truncate(args) -> int:
    op = model_from_json({"kind": args.model})
    sched = truncation1d.TruncationSchedule(tuple(float(s) for s in args.s_list.split(",")),
                                            args.density)
    report = truncation1d.truncated_spectrum(op, sched, refine=not args.no_refine)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out, ("s", "N", "eig_index", "re", "im", "retained"), list(report.csv_rows()))
    print(f"wrote {out}")
    return 0


def cmd_inject(args) -> int:
    op = model_from_json({"kind": args.model})
    V = galerkin.SubspaceBasis.first_blocks(args.vdim)
    est = essrange.estimate_essential_range(op, clip=args.clip)
    witness, mu = galerkin.inject_spurious(op, V, args.target, args.eps, region=est.limit)
    plan = galerkin.InjectionPlan((args.target,), args.eps, ((mu, witness, witness.window),))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_json(out, plan.to_json_dict())
    print(f"achieved mu = {mu} in window {witness.window}; wrote {out}")
    return 0


def cmd_classify(args) -> int:
    try:
        rows = Path(args.spectra).read_text().strip().splitlines()[1:]
        levels: dict[float, list[complex]] = {}
        for line in rows:
            parts = line.split(",")
            key = float(parts[0])
            keep = True if len(parts) < 6 else parts[5] == "true"
            if keep:
                levels.setdefault(key, []).append(complex(float(parts[3]), float(parts[4])))
        region_data = json.loads(Path(args.region).read_text())
    except (OSError, ValueError, IndexError, json.JSONDecodeError) as exc:
        raise _ParseFailure(f"cannot parse inputs: {exc}") from exc
    keys = sorted(levels)
    from .numrange import ConvexRegion, SupportFunction

    support = np.array([np.inf if s is None else s for s in region_data["support"]])
    sf = SupportFunction(np.array(region_data["angles"]), support,
                         np.zeros(0, dtype=np.complex128))
    verts = np.array([complex(a, b) for a, b in region_data["vertices"]], dtype=np.complex128)
    region = ConvexRegion(sf, tuple(region_data["clip"]), verts, region_data["empty"])
    points = cls.track([np.array(levels[k]) for k in keys], level_keys=keys)
    report = cls.classify(points, region, region_ref=args.region)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_json(out, report.to_json_dict())
    print(f"wrote {out} ({len(report.points)} accumulation points)")
    return 0


def cmd_scenario(args) -> int:
    config = _load_config(args.config, args.set)
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    result = scenarios.run_scenario(args.name, config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (header, rows) in sorted(result.csv_files.items()):
        write_csv(out / name, header, rows)
        written.append(name)
    for name, obj in sorted(result.json_files.items()):
        write_json(out / name, obj)
        written.append(name)
    for check in result.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {args.name}: {check.name}: {check.detail}")
    manifest = {
        "tool": "specpol",
        "version": __version__,
        "scenario": args.name,
        "config_hash": config_hash(config),
        "started": started,
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "outputs": sorted(written),
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in result.checks],
    }
    write_json(out / "manifest.json", manifest)
    if not result.ok:
        return CHECK_ERROR
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        raise _UsageFailure(message)


class _UsageFailure(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="specpol", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    nr = sub.add_parser("numrange", help="numerical-range boundary of a matrix")
    src = nr.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="JSON file: rows of [re, im] pairs")
    src.add_argument("--builtin", help="builtin matrix, e.g. ellipse:2, delay:3, identity:3")
    nr.add_argument("--angles", type=int, default=720)
    nr.add_argument("--clip", type=_clip_arg, default=(-100.0, 100.0, -100.0, 100.0))
    nr.add_argument("--out-dir", default="out")
    nr.set_defaults(func=cmd_numrange)

    er = sub.add_parser("essrange", help="tail-window essential-range estimate")
    er.add_argument("--model", required=True)
    er.add_argument("--clip", type=_clip_arg, required=True)
    er.add_argument("--block-starts", help="comma-separated block start indices")
    er.add_argument("--block-width", type=int, default=16)
    er.add_argument("--out", default="estimate.json")
    er.set_defaults(func=cmd_essrange)

    ga = sub.add_parser("galerkin", help="compression spectra over growing trial spaces")
    ga.add_argument("--model", required=True)
    ga.add_argument("--n-max", type=int, default=30)
    ga.add_argument("--out", default="galerkin.csv")
    ga.set_defaults(func=cmd_galerkin)

    tr = sub.add_parser("truncate", help="Dirichlet truncation spectra over an s-schedule")
    tr.add_argument("--model", required=True)
    tr.add_argument("--s-list", required=True)
    tr.add_argument("--density", type=float, default=50.0)
    tr.add_argument("--no-refine", action="store_true")
    tr.add_argument("--out", default="spectra.csv")
    tr.set_defaults(func=cmd_truncate)

    inj = sub.add_parser("inject", help="inject a spurious eigenvalue")
    inj.add_argument("--model", required=True)
    inj.add_argument("--target", type=_complex_arg, required=True, help="re,im")
    inj.add_argument("--eps", type=float, default=1e-3)
    inj.add_argument("--vdim", type=int, default=10)
    inj.add_argument("--clip", type=_clip_arg, default=(0.0, 30.0, -6.0, 6.0))
    inj.add_argument("--out", default="plan.json")
    inj.set_defaults(func=cmd_inject)

    cl = sub.add_parser("classify", help="track and classify a spectrum CSV against a region JSON")
    cl.add_argument("--spectra", required=True)
    cl.add_argument("--region", required=True)
    cl.add_argument("--out", default="report.json")
    cl.set_defaults(func=cmd_classify)

    sc = sub.add_parser("scenario", help="run a named scenario end to end")
    sc.add_argument("name", choices=scenarios.SCENARIO_NAMES)
    sc.add_argument("--config", help="JSON config file")
    sc.add_argument("--set", action="append", metavar="KEY=VALUE",
                    help="override a config key (JSON value); flags win over the file")
    sc.add_argument("--out-dir", default="out")
    sc.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        return args.func(args)
    except _UsageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (_ParseFailure, scenarios.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE_ERROR
    except HypothesisViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return HYPOTHESIS_ERROR
    except WindowExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return WINDOW_ERROR
    except (NoConvergence, SpecpolError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
