"""Monte Carlo misidentification rates over the synthetic scenarios.

For every (scenario, n, replicate) the data are regenerated from seed
``master_seed + replicate`` and each labelled candidate is tested.  Valid MR
is the share of valid candidates rejected; Invalid MR is the share of
invalid candidates not rejected.  Work is split across processes but every
task is a pure function of its seed, so results do not depend on ``jobs``.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Union

from .ait import AitConfig, EffectMode, ait_test
from .errors import AitError, ConfigError
from .synth import (TABLE_FN_NAMES, Family, MotivatingKind, NoiseDistribution,
                    ScenarioFamily, ScenarioSpec, Validity, Violation, generate,
                    motivating_example, scenario_from_names, with_violation)

Scenario = Union[ScenarioSpec, MotivatingKind]


def scenario_label(s: Scenario) -> str:
    if isinstance(s, MotivatingKind):
        return f"Motivating/{s.value}"
    return s.label()


def _constant_effect(s: Scenario) -> bool:
    return True if isinstance(s, MotivatingKind) else s.constant_effect


@dataclass(frozen=True)
class BenchConfig:
    scenarios: tuple
    sample_sizes: tuple = (2000,)
    replicates: int = 40
    master_seed: int = 0
    ait: AitConfig = field(default_factory=AitConfig)
    effect_mode: str = "auto"  # or an EffectMode forced on every scenario
    parallelism: int = 1

    def __post_init__(self):
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if not self.sample_sizes:
            raise ConfigError("need at least one sample size")
        if not self.scenarios:
            raise ConfigError("need at least one scenario")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if self.effect_mode != "auto":
            object.__setattr__(self, "effect_mode", EffectMode(self.effect_mode))


@dataclass(frozen=True)
class CandidateOutcome:
    scenario: str
    n: int
    seed: int
    candidate: str
    label: Validity
    p_value: float
    rejected: bool | None  # None when the test could not run
    error: str = ""

    def log_line(self) -> str:
        decision = "error" if self.rejected is None else ("reject" if self.rejected else "accept")
        p = "nan" if self.rejected is None else f"{self.p_value:.6g}"
        extra = f"\t{self.error}" if self.error else ""
        return (f"{self.scenario}\t{self.n}\t{self.seed}\t{self.candidate}\t"
                f"{self.label.value}\t{p}\t{decision}{extra}")


@dataclass(frozen=True)
class BenchRow:
    scenario: str
    n: int
    valid_mr: float
    invalid_mr: float
    valid_tested: int
    invalid_tested: int
    failed: int
    replicates: int
    seeds: tuple
    seconds: float = 0.0


@dataclass(frozen=True)
class BenchReport:
    rows: tuple
    outcomes: tuple
    master_seed: int

    def row(self, scenario: str, n: int) -> BenchRow:
        for r in self.rows:
            if r.scenario == scenario and r.n == n:
                return r
        raise KeyError((scenario, n))


def _ait_cfg(cfg: BenchConfig, s: Scenario, seed: int) -> AitConfig:
    if cfg.effect_mode == "auto":
        mode = EffectMode.CONSTANT if _constant_effect(s) else EffectMode.NONCONSTANT
    else:
        mode = cfg.effect_mode
    return replace(cfg.ait, effect_mode=mode, seed=seed,
                   hsic=replace(cfg.ait.hsic, seed=seed))


def _datasets(s: Scenario, n: int, seed: int):
    if isinstance(s, MotivatingKind):
        return [motivating_example(s, n, seed)]
    if s.family is ScenarioFamily.DISCRETE_TREATMENT:
        # one candidate per dataset: pair the switched-off model with the violating one
        pair = [with_violation(s, Violation.NONE)]
        if s.violation is not Violation.NONE:
            pair.append(s)
        return [generate(p, n, seed) for p in pair]
    return [generate(s, n, seed)]


def run_replicate(cfg: BenchConfig, s: Scenario, n: int, rep: int) -> list[CandidateOutcome]:
    seed = cfg.master_seed + rep
    label = scenario_label(s)
    out = []
    try:
        datasets = _datasets(s, n, seed)
    except AitError as e:
        return [CandidateOutcome(label, n, seed, "*", Validity.VALID, math.nan, None,
                                 f"{type(e).__name__}: {e}")]
    acfg = _ait_cfg(cfg, s, seed)
    for ld in datasets:
        for name, validity in ld.validity.items():
            try:
                res = ait_test(ld.data, name, acfg)
            except AitError as e:
                out.append(CandidateOutcome(label, n, seed, name, validity, math.nan, None,
                                            f"{type(e).__name__}: {e}"))
                continue
            out.append(CandidateOutcome(label, n, seed, name, validity, res.p_value, res.rejected))
    return out


def _task(args):
    cfg, s, n, rep = args
    t0 = time.perf_counter()
    res = run_replicate(cfg, s, n, rep)
    return res, time.perf_counter() - t0


def summarize(outcomes, scenario: str, n: int, replicates: int, seeds, seconds=0.0) -> BenchRow:
    ok = [o for o in outcomes if o.rejected is not None]
    valid = [o for o in ok if o.label.is_valid]
    invalid = [o for o in ok if not o.label.is_valid]
    vmr = sum(o.rejected for o in valid) / len(valid) if valid else math.nan
    imr = sum(not o.rejected for o in invalid) / len(invalid) if invalid else math.nan
    failed = len({o.seed for o in outcomes if o.rejected is None})
    return BenchRow(scenario, n, vmr, imr, len(valid), len(invalid), failed,
                    replicates, tuple(seeds), seconds)


def run_mc(cfg: BenchConfig) -> BenchReport:
    tasks = [(cfg, s, n, rep) for s in cfg.scenarios for n in cfg.sample_sizes
             for rep in range(cfg.replicates)]
    if cfg.parallelism == 1:
        results = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * cfg.parallelism))))

    rows, outcomes = [], []
    k = 0
    for s in cfg.scenarios:
        for n in cfg.sample_sizes:
            block = results[k:k + cfg.replicates]
            k += cfg.replicates
            flat = [o for res, _ in block for o in res]
            outcomes.extend(flat)
            seeds = [cfg.master_seed + r for r in range(cfg.replicates)]
            rows.append(summarize(flat, scenario_label(s), n, cfg.replicates, seeds,
                                  sum(t for _, t in block)))
    return BenchReport(rows=tuple(rows), outcomes=tuple(outcomes), master_seed=cfg.master_seed)


def _fmt(v: float) -> str:
    return "-" if math.isnan(v) else f"{v:.2f}"


HEADER = ("Scenario", "n", "Valid MR", "Invalid MR", "Replicates", "Failed")


def emit_table(report: BenchReport, fmt: str = "tsv") -> str:
    """Render one line per (scenario, n); timings are left out so output is reproducible."""
    if not report.rows:
        raise ConfigError("empty report")
    body = [(r.scenario, str(r.n), _fmt(r.valid_mr), _fmt(r.invalid_mr),
             str(r.replicates), str(r.failed)) for r in report.rows]
    fmt = fmt.lower()
    if fmt == "tsv":
        return "\n".join("\t".join(line) for line in [HEADER, *body]) + "\n"
    if fmt in ("md", "markdown"):
        lines = ["| " + " | ".join(HEADER) + " |",
                 "|" + "|".join(["---"] + ["---:"] * (len(HEADER) - 1)) + "|"]
        lines += ["| " + " | ".join(line) + " |" for line in body]
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown table format {fmt!r}")


def emit_log(report: BenchReport) -> str:
    head = "scenario\tn\tseed\tcandidate\tlabel\tp_value\tdecision"
    return "\n".join([head, *(o.log_line() for o in report.outcomes)]) + "\n"


# -- suites -----------------------------------------------------------------

def quick_suite() -> list:
    return [
        scenario_from_names("table2", "gaussian"),
        scenario_from_names("table2", "uniform"),
        scenario_from_names("table3", fn="quadratic"),
        scenario_from_names("table4", fn="quadratic"),
        scenario_from_names("table5", fn="quadratic"),
        scenario_from_names("table8"),
        *MotivatingKind,
    ]


def paper_suite() -> list:
    out = [ScenarioSpec(ScenarioFamily.LINEAR_EXOGENEITY, noise=NoiseDistribution(f))
           for f in (Family.UNIFORM, Family.BETA, Family.T, Family.GAMMA,
                     Family.LOGNORMAL, Family.GAUSSIAN, Family.MIXED)]
    for key in ("table3", "table4", "table5", "table6"):
        out += [scenario_from_names(key, fn=fn) for fn in TABLE_FN_NAMES]
    out += [scenario_from_names("table7", q=q) for q in (2, 3, 5)]
    out.append(scenario_from_names("table8"))
    out += list(MotivatingKind)
    return out


SUITES = {"quick": quick_suite, "paper": paper_suite}

__all__ = ["BenchConfig", "BenchReport", "BenchRow", "CandidateOutcome", "run_mc", "emit_table",
           "emit_log", "quick_suite", "paper_suite", "SUITES", "scenario_label"]
