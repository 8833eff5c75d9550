"""Command-line front end.

Every subcommand takes ``--config FILE`` (YAML) plus flags mirroring the
config fields. Precedence: flag > config file > built-in default.
Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any

import numpy as np

from .config import SystemConfig, load_config, parse_quantity
from .inversion import EulerSettings, InversionError
from .mgf import MgfEvaluator, QuadratureError
from .sweeps import EXPERIMENT_DEFAULTS, capacity_sweep, outage_sweep

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

_SYSTEM_FLAGS = {
    "M": int, "N": int, "Ps": str, "sigma_n_sq": str, "alpha": str, "d0": str, "d1": str, "d2": str,
    "K0": str, "K1": str, "K2": str, "theta_bd_d": str, "theta_bd_i": str, "theta_rd": str,
    "theta_ra": str, "d_over_lambda": str, "gamma": str, "mu": str, "seed": int,
}

RUN_DEFAULTS: dict[str, Any] = {
    "trials": 1000,
    "arch": "fd,fa",
    "format": "csv",
    "workers": 1,
    "N_grid": "16,32,64",
    "K_grid": "1,10,100",
    "mu_grid": None,
    "beta_db": None,
    "lb_variant": "with_m",
    "euler_A": 18.4,
    "euler_n": 21,
    "euler_m": 15,
    "s_grid": "0:2:21",
    "tolerance_scale": 1.0,
    "quick": False,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="YAML file with config and run fields")
    g = p.add_argument_group("system")
    for name, typ in _SYSTEM_FLAGS.items():
        g.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ, default=None)
    g.add_argument("--K", dest="K", default=None, help="one Rician factor for all three links")
    g.add_argument("--direct-link", dest="direct_link", action="store_true", default=None)
    g.add_argument("--no-direct-link", dest="direct_link", action="store_false")
    r = p.add_argument_group("run")
    r.add_argument("--trials", type=int, default=None)
    r.add_argument("--arch", default=None, help="comma list of fd, fa, mrt")
    r.add_argument("--out", type=Path, default=None)
    r.add_argument("--format", choices=("csv", "json"), default=None)
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="risbeam", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("capacity-sweep", help="mean capacity and bound over N x K (x mu) x arch")
    _common(p)
    p.add_argument("--N-grid", dest="N_grid", default=None)
    p.add_argument("--K-grid", dest="K_grid", default=None)
    p.add_argument("--mu-grid", dest="mu_grid", default=None, help="e.g. off,10dB,20dB")

    p = sub.add_parser("outage-curve", help="Monte Carlo outage and analytic lower bound per K")
    _common(p)
    p.add_argument("--K-grid", dest="K_grid", default=None)
    p.add_argument("--beta-db", dest="beta_db", default=None, help="start:stop:num or comma list")
    p.add_argument("--lb-variant", dest="lb_variant", choices=("with_m", "no_m"), default=None)
    p.add_argument("--euler-A", dest="euler_A", type=float, default=None)
    p.add_argument("--euler-n", dest="euler_n", type=int, default=None)
    p.add_argument("--euler-m", dest="euler_m", type=int, default=None)

    p = sub.add_parser("validate", help="run the oracle suite")
    _common(p)
    p.add_argument("--tolerance-scale", dest="tolerance_scale", type=float, default=None)
    p.add_argument("--quick", action="store_true", default=None)

    p = sub.add_parser("mgf-probe", help="dump E[exp(-sY)] of ||E||_{1,1} on an s grid")
    _common(p)
    p.add_argument("--s-grid", dest="s_grid", default=None, help="start:stop:num or comma list")
    return parser


_RUN_KEYS = set(RUN_DEFAULTS) | {"out"}


def _split_file(data: dict) -> tuple[dict, dict]:
    system, run = {}, {}
    for k, v in data.items():
        (run if k in _RUN_KEYS else system)[k] = v
    return system, run


def _expand_k(d: dict) -> dict:
    # a joint K fills in whichever of K0/K1/K2 the same layer leaves unset
    d = dict(d)
    k = d.pop("K", None)
    if k is not None:
        for name in ("K0", "K1", "K2"):
            if d.get(name) is None:
                d[name] = k
    return d


def resolve(args: argparse.Namespace) -> tuple[SystemConfig, dict]:
    """Merge defaults, config file and flags (in increasing precedence)."""
    file_sys, file_run = _split_file(load_config(args.config))
    cli = {k: v for k, v in vars(args).items() if v is not None}
    cli_sys = {k: v for k, v in cli.items() if k in _SYSTEM_FLAGS or k in ("K", "direct_link")}
    cli_run = {k: v for k, v in cli.items() if k in _RUN_KEYS}
    try:
        cfg = SystemConfig.from_mapping(_expand_k(file_sys), base=EXPERIMENT_DEFAULTS)
        cfg = SystemConfig.from_mapping(_expand_k(cli_sys), base=cfg)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    run = dict(RUN_DEFAULTS)
    run.update(file_run)
    run.update(cli_run)
    return cfg, run


def _floats(grid, amplitude=False) -> list:
    if grid is None:
        return []
    if isinstance(grid, (list, tuple)):
        items = list(grid)
    else:
        s = str(grid)
        if s.count(":") == 2:
            a, b, n = s.split(":")
            return list(np.linspace(float(a), float(b), int(n)))
        items = [x for x in s.split(",") if x.strip()]
    out = []
    for x in items:
        if str(x).strip().lower() in ("off", "none"):
            out.append(None)
        else:
            out.append(parse_quantity(x, amplitude=amplitude))
    return out


def _archs(names) -> list[str]:
    items = names if isinstance(names, (list, tuple)) else str(names).split(",")
    archs = [a.strip() for a in items if str(a).strip()]
    bad = [a for a in archs if a not in ("fd", "fa", "mrt")]
    if bad or not archs:
        raise UsageError(f"unknown architecture(s) {bad or archs}")
    return archs


def _emit(result, fmt: str, out: Path | None):
    text = result.to_csv() if fmt == "csv" else result.to_json() + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cmd_capacity(cfg, run):
    N_grid = [int(n) for n in _floats(run["N_grid"])]
    K_grid = _floats(run["K_grid"])
    mu_grid = _floats(run["mu_grid"], amplitude=True) if run["mu_grid"] is not None else None
    if any(n < 1 for n in N_grid) or not N_grid or not K_grid:
        raise UsageError("invalid N/K grid")
    res = capacity_sweep(cfg, N_grid, K_grid, _archs(run["arch"]), mu_grid,
                         int(run["trials"]), cfg.seed, int(run["workers"]))
    _emit(res, run["format"], run.get("out"))


def _cmd_outage(cfg, run):
    K_grid = _floats(run["K_grid"])
    beta_db = _floats(run["beta_db"]) if run["beta_db"] is not None else None
    settings = EulerSettings(A=float(run["euler_A"]), n=int(run["euler_n"]), m=int(run["euler_m"]))
    archs = [a for a in _archs(run["arch"])]
    res = outage_sweep(cfg, K_grid, beta_db, int(run["trials"]), cfg.seed, archs,
                       run["lb_variant"], settings, int(run["workers"]))
    _emit(res, run["format"], run.get("out"))


def _cmd_validate(cfg, run) -> int:
    from .validation import run_validation

    checks = run_validation(cfg.seed, float(run["tolerance_scale"]), bool(run["quick"]))
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def _cmd_mgf_probe(cfg, run):
    from .sweeps import SweepResult

    s = np.asarray(_floats(run["s_grid"]), dtype=float)
    if np.any(s < 0):
        raise UsageError("s grid must be non-negative")
    ev = MgfEvaluator.from_config(cfg)
    vals = np.atleast_1d(ev.evaluate(s))
    rows = [{"s": float(a), "mgf_re": float(v.real), "mgf_im": float(v.imag), "M": cfg.M, "N": cfg.N,
             "K1": cfg.K1, "K2": cfg.K2} for a, v in zip(s, vals)]
    _emit(SweepResult({"s": [float(x) for x in s]}, rows, {"config_hash": cfg.config_hash()}),
          run["format"], run.get("out"))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, run = resolve(args)
        if args.command == "capacity-sweep":
            _cmd_capacity(cfg, run)
        elif args.command == "outage-curve":
            _cmd_outage(cfg, run)
        elif args.command == "validate":
            return _cmd_validate(cfg, run)
        elif args.command == "mgf-probe":
            _cmd_mgf_probe(cfg, run)
    except UsageError as exc:
        print(f"risbeam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, InversionError) as exc:
        print(f"risbeam: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        print(f"risbeam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
