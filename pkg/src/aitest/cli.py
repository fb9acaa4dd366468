"""Command-line entry point: ``aitest test | simulate | bench``.

Exit codes: 0 on success (whatever the test decides), 2 for usage or input
problems, 3 when a statistical precondition fails (e.g. a weak instrument).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .ait import AUTO, AitConfig, EffectMode, ait_test
from .bench import SUITES, BenchConfig, emit_log, emit_table, run_mc
from .data import ColumnRoles, load_csv, write_csv
from .errors import AitError, ConfigError
from .estimators import EstimatorConfig
from .hsic import HsicConfig
from .synth import SCENARIO_KEYS, generate, scenario_from_names

log = logging.getLogger("aitest")

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _alpha(text: str):
    if text.lower() == AUTO:
        return AUTO
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None
    if not 0 < v <= 0.5:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 0.5]")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _sizes(text: str) -> list[int]:
    return [_positive(t) for t in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aitest", description="Test whether candidate instrumental variables are invalid.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="key=value file with default flag values (flags win)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="test candidate instruments in a CSV file")
    t.add_argument("--data", required=True, help="CSV file with a header row")
    t.add_argument("--x", required=True, help="treatment column")
    t.add_argument("--y", required=True, help="outcome column")
    t.add_argument("--z", required=True, action="append", help="candidate instrument column (repeatable)")
    t.add_argument("--w", action="append", default=[], help="covariate column (repeatable)")
    t.add_argument("--alpha", type=_alpha, default=AUTO, help="significance level or 'auto' (10/n)")
    t.add_argument("--effect", choices=["constant", "nonconstant"], default="nonconstant")
    t.add_argument("--degree-z", type=_positive, default=3, help="instrument polynomial degree")
    t.add_argument("--degree-x", type=_positive, default=2, help="treatment polynomial degree")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--json", action="store_true", help="print one JSON object per candidate")

    s = sub.add_parser("simulate", help="write a synthetic dataset")
    s.add_argument("--scenario", required=True, help=f"one of {', '.join(SCENARIO_KEYS)}")
    s.add_argument("--dist", help="noise family (Gaussian, Uniform, T, Beta, Gamma, LogNormal, Mixed)")
    s.add_argument("--fn", help="nonlinear function (Log, Quadratic, Cubic, LogQuadratic, ExpQuadratic)")
    s.add_argument("--q", type=int, help="covariate count for table7 (2, 3 or 5)")
    s.add_argument("--violation", help="table8 only: none, exogeneity, exclusion or both")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True, help="CSV path; metadata goes to <out>.meta")

    b = sub.add_parser("bench", help="Monte Carlo misidentification rates")
    b.add_argument("--suite", choices=sorted(SUITES), default="quick")
    b.add_argument("--replicates", type=int, default=40)
    b.add_argument("--sizes", type=_sizes, default=[2000], help="comma-separated sample sizes")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="table path (stdout if omitted)")
    b.add_argument("--jobs", type=_positive, default=1)
    b.add_argument("--format", choices=["tsv", "markdown"], default="tsv")
    b.add_argument("--log", help="per-replicate log path")
    return p


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment, repeated keys accumulate."""
    out: dict[str, list[str]] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    for i, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        out.setdefault(k.replace("_", "-").lstrip("-"), []).append(v)
    return out


def _merge_config(argv: list[str]) -> list[str]:
    """Prepend config-file values as flags so explicit flags override them."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    cfg = read_config(known.config)
    cmd_at = next((i for i, a in enumerate(argv) if a in ("test", "simulate", "bench")), None)
    if cmd_at is None:
        return argv
    given = {a.split("=", 1)[0].lstrip("-") for a in argv[cmd_at + 1:] if a.startswith("--")}
    extra = []
    for k, vals in cfg.items():
        if k in given:
            continue
        for v in vals:
            if k == "json" and v.lower() in ("1", "true", "yes"):
                extra.append("--json")
            elif k != "json":
                extra += [f"--{k}", v]
    return argv[:cmd_at + 1] + extra + argv[cmd_at + 1:]


def cmd_test(args) -> int:
    roles = ColumnRoles(args.x, args.y, tuple(args.z), tuple(args.w))
    data = load_csv(args.data, roles)
    cfg = AitConfig(
        effect_mode=EffectMode.CONSTANT if args.effect == "constant" else EffectMode.NONCONSTANT,
        estimator=EstimatorConfig(instrument_basis_degree=args.degree_z,
                                  treatment_basis_degree=args.degree_x),
        hsic=HsicConfig(seed=args.seed), alpha=args.alpha, seed=args.seed)
    for name in roles.z_names:
        res = ait_test(data, name, cfg)
        h = res.fitted
        record = {
            "candidate": name,
            "n": data.n,
            "p_value": res.p_value,
            "alpha": res.alpha_used,
            "decision": "reject H0: invalid IV" if res.rejected else "fail to reject",
            "hypothesis": "H0: Z is a valid IV",
            "estimator": h.method.value,
            "intercept": h.intercept,
            "x_coefficients": [float(c) for c in h.x_coefficients],
            "w_coefficients": dict(zip(data.w_names, (float(c) for c in h.w_coefficients))),
            "hsic_method": res.independence.method.value,
            "hsic_statistic": res.independence.statistic,
        }
        if args.json:
            print(json.dumps(record, sort_keys=True))
            continue
        print(f"candidate {name} (n={data.n}, H0: {name} is a valid IV)")
        print(f"  p-value   {res.p_value:.6g}  (alpha {res.alpha_used:.6g}, {record['hsic_method']} HSIC)")
        print(f"  decision  {record['decision']}")
        coefs = ", ".join(f"{c:.6g}" for c in record["x_coefficients"])
        print(f"  effect    {h.method.value}: intercept {h.intercept:.6g}, X powers [{coefs}]")
        if record["w_coefficients"]:
            w = ", ".join(f"{k}={v:.6g}" for k, v in record["w_coefficients"].items())
            print(f"  covariates {w}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = scenario_from_names(args.scenario, args.dist, args.fn, args.q, args.violation)
    ld = generate(spec, args.n, args.seed)
    out = Path(args.out)
    write_csv(out, ld.data)
    meta = ld.metadata()
    lines = [f"{k}={v}" for k, v in meta.items()]
    Path(str(out) + ".meta").write_text("\n".join(lines) + "\n")
    log.info("wrote %d rows to %s", ld.data.n, out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.replicates < 1:
        raise ConfigError(f"--replicates must be >= 1, got {args.replicates}")
    cfg = BenchConfig(scenarios=SUITES[args.suite](), sample_sizes=tuple(args.sizes),
                      replicates=args.replicates, master_seed=args.seed,
                      parallelism=args.jobs)
    report = run_mc(cfg)
    table = emit_table(report, args.format)
    if args.out:
        Path(args.out).write_text(table)
    else:
        sys.stdout.write(table)
    if args.log:
        Path(args.log).write_text(emit_log(report))
    for row in report.rows:
        log.info("%s n=%d: %.1fs, %d failed", row.scenario, row.n, row.seconds, row.failed)
    return EXIT_OK


COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "bench": cmd_bench}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _merge_config(argv)
    except AitError as e:
        print(f"aitest: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except AitError as e:
        print(f"aitest: error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
