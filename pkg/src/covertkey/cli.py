"""Command-line front end.

Every command writes its artifacts plus ``<command>_manifest.json`` into
``--out``. The manifest stores the canonical argument list (with the seed
resolved), the channel hash and output hashes; ``covertkey replay MANIFEST``
re-runs it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import secrets
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .channel import (ALPHA_GRID, CovertConfig, dump_channel, expansion_report, file_sha256,
                      load_channel, scaling_checks, table1_channel, validate)
from .errors import BudgetExceeded, CovertKeyError, DegenerateChannel, EmptyRegion, InfeasiblePlan
from .regions import default_rho_grid, default_wsk_grid, region_union, wsk_region_sweep
from .sim import (DECODERS, decay_study, exact_metrics, fixed_plan, protocol_metrics,
                  rate_plan, reliability_terms, resolvability_terms, sample_codebooks,
                  source_simulation_rhs)
from .sim.report import rows_to_csv

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 1, 2, 3, 4

RHO_STAR = (0.28, 0.72)
BUILTIN_CHANNELS = {"table1-1": "table1_channel1.json", "table1-2": "table1_channel2.json"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def data_path(name: str) -> Path:
    return Path(str(resources.files("covertkey") / "data" / name))


def resolve_channel(name: str) -> Path:
    path = data_path(BUILTIN_CHANNELS[name]) if name in BUILTIN_CHANNELS else Path(name)
    if not path.is_file():
        raise UsageError(f"channel file not found: {name}")
    return path


def _rho(text: str) -> tuple:
    try:
        r1, r2 = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'r1,r2', got {text!r}")
    return r1, r2


def _sizes(text: str) -> tuple:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'G,M,N', got {text!r}")
    if len(vals) != 3 or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"expected three positive integers, got {text!r}")
    return vals


def _add_channel(p):
    p.add_argument("--channel", default="table1-1",
                   help="channel JSON file or a built-in name (table1-1, table1-2)")


def _add_covert(p, alpha=True):
    p.add_argument("--rho", type=_rho, default=RHO_STAR, help="weight split r1,r2")
    if alpha:
        p.add_argument("--alpha", type=float, default=0.25, help="per-use amplitude")


def _add_code(p):
    p.add_argument("--n", type=int, default=4, help="block length")
    p.add_argument("--mu1", type=float, default=0.1)
    p.add_argument("--mu2", type=float, default=0.1)
    p.add_argument("--mu3", type=float, default=0.1)
    p.add_argument("--sizes", type=_sizes, nargs=2, metavar="G,M,N",
                   help="fix per-user sizes instead of planning them")
    p.add_argument("--policy", choices=("strict", "relaxed"), default="strict",
                   help="reject (strict) or record (relaxed) constraint violations")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="covertkey", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("region-csk", help="covert secret-key inner/outer region boundaries")
    _add_channel(p)
    p.add_argument("--grid", type=int, default=1001, help="number of rho1 grid points")
    p.add_argument("--grid-lo", type=float, default=0.001)
    p.add_argument("--grid-hi", type=float, default=0.999)
    p.add_argument("--out", default="out")

    p = sub.add_parser("region-wsk", help="wiretap secret-key inner/outer region boundaries")
    _add_channel(p)
    p.add_argument("--grid", type=int, default=101, help="grid points per input-law axis")
    p.add_argument("--out", default="out")

    p = sub.add_parser("verify-expansions", help="small-alpha expansion residual checks")
    _add_channel(p)
    _add_covert(p, alpha=False)
    p.add_argument("--alpha", type=float, nargs="+", default=list(ALPHA_GRID))
    p.add_argument("--out", default="out")

    p = sub.add_parser("simulate", help="exact and Monte Carlo code metrics")
    _add_channel(p)
    _add_covert(p)
    _add_code(p)
    p.add_argument("--mode", choices=("exact", "mc", "both"), default="both")
    p.add_argument("--trials", type=int, default=10**4)
    p.add_argument("--decoder", choices=DECODERS, default="map")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="out")

    p = sub.add_parser("bounds", help="finite-length reliability/resolvability bounds")
    _add_channel(p)
    _add_covert(p)
    _add_code(p)
    p.add_argument("--n-list", type=int, nargs="+", help="evaluate at several block lengths")
    p.add_argument("--out", default="out")

    p = sub.add_parser("decay", help="metric trends along the amplitude schedule")
    _add_channel(p)
    _add_covert(p, alpha=False)
    p.add_argument("--n-list", type=int, nargs="+", default=[8, 12, 16, 20])
    p.add_argument("--mu1", type=float, default=0.1)
    p.add_argument("--mu2", type=float, default=0.1)
    p.add_argument("--mu3", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=10**4)
    p.add_argument("--decoder", choices=DECODERS, default="map")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default="out")

    p = sub.add_parser("examples", help="regenerate the reference channel files and example outputs")
    p.add_argument("--out", default="examples_out")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--trials", type=int, default=10**4)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="override the output directory")
    return parser


# ---------------------------------------------------------------------------
# helpers


class Run:
    """Collects the outputs of one command and writes its manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.files = {}
        self.channel_hash = None

    def channel(self):
        path = resolve_channel(self.args.channel)
        self.channel_hash = file_sha256(path)
        mac = load_channel(path)
        report = validate(mac)
        if not report.ok:
            print(json.dumps(report.to_dict(), indent=2), file=sys.stderr)
            raise _Exit(EXIT_VALIDATION)
        return mac

    def write(self, name: str, text: str):
        (self.out / name).write_text(text, encoding="utf-8")
        self.files[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()

    def write_json(self, name: str, doc):
        doc = {"config": self.config(), **doc}
        self.write(name, json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n")

    def config(self) -> dict:
        return {k: v for k, v in vars(self.args).items() if k not in ("out",)}

    def finish(self):
        doc = {"command": self.args.command, "argv": self.argv, "config": self.config(),
               "channel_sha256": self.channel_hash, "outputs": self.files,
               "version": __version__}
        name = f"{self.args.command}_manifest.json"
        (self.out / name).write_text(
            json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n", encoding="utf-8")


class _Exit(Exception):
    def __init__(self, code):
        self.code = code


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(f"not JSON serializable: {type(v)}")


def _resolve_seed(args, argv):
    if getattr(args, "seed", 0) is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
        argv = list(argv) + ["--seed", str(args.seed)]
    return argv


def _cfg(args, alpha=None) -> CovertConfig:
    try:
        return CovertConfig(tuple(args.rho), args.alpha if alpha is None else alpha)
    except ValueError as exc:
        raise UsageError(str(exc))


def _plan(mac, cfg, args, n=None):
    n = args.n if n is None else n
    if args.sizes:
        return fixed_plan(mac, cfg, n, args.sizes, args.mu1, args.mu2, args.mu3)
    return rate_plan(mac, cfg, n, args.mu1, args.mu2, args.mu3, policy=args.policy)


# ---------------------------------------------------------------------------
# commands


def cmd_region_csk(run: Run):
    a = run.args
    mac = run.channel()
    if a.grid < 1:
        raise UsageError("--grid must be at least 1")
    grid = default_rho_grid(a.grid, a.grid_lo, a.grid_hi)
    for kind in ("inner", "outer"):
        b = region_union(mac, grid, kind)
        run.write(f"{b.kind}.csv", b.to_csv())
        run.write(f"{b.kind}_envelope.csv", b.envelope_csv())
    print(f"wrote csk_inner.csv, csk_outer.csv to {run.out}")


def cmd_region_wsk(run: Run):
    a = run.args
    mac = run.channel()
    if a.grid < 1:
        raise UsageError("--grid must be at least 1")
    inner, outer = wsk_region_sweep(mac, default_wsk_grid(a.grid))
    for b in (inner, outer):
        run.write(f"{b.kind}.csv", b.to_csv())
        run.write(f"{b.kind}_envelope.csv", b.envelope_csv())
    print(f"wrote wsk_inner.csv, wsk_outer.csv to {run.out}")


def cmd_verify_expansions(run: Run):
    a = run.args
    mac = run.channel()
    for alpha in a.alpha:
        _cfg(a, alpha)
    reports = [expansion_report(mac, CovertConfig(tuple(a.rho), alpha)).to_dict()
               for alpha in a.alpha]
    checks = scaling_checks(mac, a.rho, a.alpha)
    doc = {"reports": reports,
           "checks": [{"name": c.name, "values": list(c.values), "ratio": c.ratio,
                       "passed": c.passed} for c in checks],
           "all_passed": all(c.passed for c in checks)}
    run.write_json("expansions.json", doc)
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} scaling checks passed"
          + (f"; failed: {', '.join(failed)}" if failed else ""))


def cmd_simulate(run: Run):
    a = run.args
    mac = run.channel()
    cfg = _cfg(a)
    if a.trials < 1:
        raise UsageError("--trials must be at least 1")
    plan = _plan(mac, cfg, a)
    cb = sample_codebooks(plan, cfg, a.seed)
    doc = {"plan": plan.to_dict()}
    rows = []
    if a.mode in ("exact", "both"):
        rep = exact_metrics(cb, mac, cfg, a.decoder)
        doc["exact"] = rep.to_dict()
        rows.append(rep.to_dict())
    if a.mode in ("mc", "both"):
        rep = protocol_metrics(cb, mac, cfg, a.trials, a.seed, a.decoder, workers=a.workers)
        doc["monte_carlo"] = rep.to_dict()
        rows.append(rep.to_dict())
    run.write_json("simulate.json", doc)
    cols = ["mode", "scheme", "decoder", "n", "trials", "p_err", "p_err_half_width",
            "secrecy_tv", "secrecy_kl", "source_tv_1", "source_tv_2", "covertness_kl",
            "protocol_p_err", "protocol_secrecy_tv", "empty_preimage_prob", "secrecy_source"]
    run.write("simulate.csv", rows_to_csv(rows, cols))
    for r in rows:
        print(f"{r['mode']}: p_err={r['p_err']:.6g} secrecy_tv={r['secrecy_tv']:.6g} "
              f"covertness_kl={r['covertness_kl']:.6g}")


def cmd_bounds(run: Run):
    a = run.args
    mac = run.channel()
    cfg = _cfg(a)
    out = []
    for n in (a.n_list or [a.n]):
        plan = _plan(mac, cfg, a, n)
        out.append({
            "n": n, "plan": plan.to_dict(),
            "reliability": reliability_terms(plan, mac, cfg).to_dict(),
            "resolvability": resolvability_terms(plan, mac, cfg).to_dict(),
            "source_simulation": [source_simulation_rhs(plan, cfg, u) for u in (1, 2)],
        })
        print(f"n={n}: reliability rhs={out[-1]['reliability']['total']:.6g} "
              f"resolvability rhs={out[-1]['resolvability']['total']:.6g}")
    run.write_json("bounds.json", {"bounds": out})


def cmd_decay(run: Run):
    a = run.args
    mac = run.channel()
    _cfg(a, 0.0)
    table = decay_study(mac, tuple(a.rho), a.n_list, (a.mu1, a.mu2, a.mu3), a.trials,
                        a.seed, a.decoder)
    run.write("decay.csv", table.to_csv())
    run.write_json("decay.json", table.to_dict())
    for name, fit in table.fits.items():
        print(f"{name}: slope={fit.slope:.6g} residual={fit.residual:.6g}")


def cmd_examples(run: Run):
    a = run.args
    mismatched = []
    for which in (1, 2):
        name = f"table1_channel{which}.json"
        text = dump_channel(table1_channel(which))
        run.write(name, text)
        if data_path(name).read_text(encoding="utf-8") != text:
            mismatched.append(name)
    steps = [
        ["region-csk", "--channel", str(run.out / "table1_channel1.json"),
         "--out", str(run.out / "csk_channel1")],
        ["region-csk", "--channel", str(run.out / "table1_channel2.json"),
         "--out", str(run.out / "csk_channel2")],
        ["region-wsk", "--channel", str(run.out / "table1_channel2.json"),
         "--out", str(run.out / "wsk_channel2")],
        ["verify-expansions", "--channel", str(run.out / "table1_channel1.json"),
         "--out", str(run.out / "expansions_channel1")],
        ["simulate", "--channel", str(run.out / "table1_channel1.json"), "--n", "4",
         "--sizes", "2,2,2", "2,2,2", "--trials", str(a.trials), "--seed", str(a.seed),
         "--out", str(run.out / "simulate_tiny")],
    ]
    for argv in steps:
        code = main(argv)
        if code != EXIT_OK:
            raise _Exit(code)
    if mismatched:
        print(f"regenerated fixtures differ from the shipped copies: {mismatched}",
              file=sys.stderr)
        raise _Exit(EXIT_VALIDATION)
    print("channel files match the shipped fixtures byte for byte")


def cmd_replay(args) -> int:
    doc = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    argv = list(doc["argv"])
    if args.out:
        argv = _replace_out(argv, args.out)
    parsed = build_parser().parse_args(argv)
    if doc.get("channel_sha256") and hasattr(parsed, "channel"):
        if file_sha256(resolve_channel(parsed.channel)) != doc["channel_sha256"]:
            print("channel file changed since the manifest was written", file=sys.stderr)
            return EXIT_VALIDATION
    return main(argv)


def _replace_out(argv, out):
    argv = list(argv)
    if "--out" in argv:
        argv[argv.index("--out") + 1] = out
    else:
        argv += ["--out", out]
    return argv


COMMANDS = {
    "region-csk": cmd_region_csk,
    "region-wsk": cmd_region_wsk,
    "verify-expansions": cmd_verify_expansions,
    "simulate": cmd_simulate,
    "bounds": cmd_bounds,
    "decay": cmd_decay,
    "examples": cmd_examples,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "replay":
        return cmd_replay(args)
    argv = _resolve_seed(args, argv)
    if "--out" not in argv:
        argv = argv + ["--out", args.out]
    run = Run(args, argv)
    try:
        COMMANDS[args.command](run)
    except _Exit as exc:
        return exc.code
    except UsageError as exc:
        print(f"covertkey: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasiblePlan as exc:
        print(f"covertkey: infeasible plan: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExceeded as exc:
        print(f"covertkey: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DegenerateChannel, EmptyRegion) as exc:
        print(f"covertkey: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (CovertKeyError, ValueError) as exc:
        print(f"covertkey: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    run.finish()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
