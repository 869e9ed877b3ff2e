"""Command-line surface tying construction, execution, verification and sweeps together.

Exit codes: 0 ok, 2 usage error, 3 the adaptive builder produced an unbounded
witness instead of an instance, 4 an algorithm violated the online contract.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .adversary import (
    GapLedger,
    UnboundedWitness,
    build_adaptive,
    build_randomized,
    build_symmetric,
)
from .algorithms import (
    BiasedChoice,
    BiasParams,
    ChoiceAlgorithm,
    ConstantChoice,
    GreedyChoice,
    HarmonicChoice,
    Side,
    TNetCostAlgorithm,
    WfaAlgorithm,
    algorithm_choice_on_interval,
    run_online,
)
from .analysis import (
    VERIFY_SUITES,
    monte_carlo_ratio,
    ratio_bound_deterministic,
    ratio_bound_randomized,
    symmetric_ratio,
)
from .core import ContractViolationError, Instance, format_rational, parse_rational
from .offline import optimal_cost

CSV_COLUMNS = ["mode", "algorithm", "k", "eps", "ratio_num", "ratio_den",
               "bound_num", "bound_den", "trials", "mean", "stderr", "note"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNBOUNDED = 3
EXIT_CONTRACT = 4


class UsageError(ValueError):
    pass


def make_algorithm(selector: str):
    """Fresh online algorithm for a selector string.

    Selectors: greedy | wfa | tnet:<t as num/den> | harmonic | biased:<beta>
    plus the test stubs constant:left / constant:right.
    """
    if selector == "greedy":
        return ChoiceAlgorithm(GreedyChoice())
    if selector == "wfa":
        return WfaAlgorithm()
    if selector == "harmonic":
        return ChoiceAlgorithm(HarmonicChoice())
    if selector.startswith("tnet:"):
        return TNetCostAlgorithm(parse_rational(selector.split(":", 1)[1]))
    if selector.startswith("biased:"):
        return ChoiceAlgorithm(BiasedChoice(BiasParams(parse_rational(selector.split(":", 1)[1]))))
    if selector.startswith("constant:"):
        side = selector.split(":", 1)[1]
        if side not in ("left", "right"):
            raise UsageError(f"unknown constant side {side!r}")
        return ChoiceAlgorithm(ConstantChoice(Side.LEFT if side == "left" else Side.RIGHT))
    raise UsageError(f"unknown algorithm selector {selector!r}")


def is_randomized(selector: str) -> bool:
    return selector == "harmonic"


class _AlgorithmAsChoice:
    """Choice-function view of a full algorithm (fresh replay per probe)."""

    def __init__(self, selector: str):
        self.selector = selector

    def choose(self, interval):
        return algorithm_choice_on_interval(lambda: make_algorithm(self.selector), interval)


def make_choice(selector: str):
    """Local choice function for the adaptive builder."""
    if selector == "greedy":
        return GreedyChoice()
    if selector.startswith("biased:"):
        return BiasedChoice(BiasParams(parse_rational(selector.split(":", 1)[1])))
    if selector.startswith("constant:"):
        side = selector.split(":", 1)[1]
        return ConstantChoice(Side.LEFT if side == "left" else Side.RIGHT)
    if selector in ("wfa",) or selector.startswith("tnet:"):
        return _AlgorithmAsChoice(selector)
    if selector == "harmonic":
        raise UsageError("adaptive construction probes deterministic choices; harmonic is randomized")
    raise UsageError(f"unknown algorithm selector {selector!r}")


@dataclass
class RunConfig:
    mode: str = "symmetric"
    algo: str = "greedy"
    k: int = 3
    eps: str = "1/1099511627776"            # 2**-40
    budget: str = "1048576/1"               # 2**20
    trials: int = 10000
    seed: int = 0
    out: str = ""
    out_dir: str = "."
    infile: str = ""
    schedule: str = ""
    suite: str = "all"
    cases: int = 0
    algos: str = ""
    k_min: int = 2
    k_max: int = 6

    @property
    def eps_value(self) -> Fraction:
        return parse_rational(self.eps)

    @property
    def budget_value(self) -> Fraction:
        return parse_rational(self.budget)

    def to_file_text(self) -> str:
        lines = [f"{f.name}={getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"


def parse_config_file(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"bad config line: {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def config_from(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    file_values = parse_config_file(args.config) if getattr(args, "config", None) else {}
    int_fields = {"k", "trials", "seed", "cases", "k_min", "k_max"}
    for f in fields(RunConfig):
        if f.name in file_values:
            raw = file_values[f.name]
            setattr(cfg, f.name, int(raw) if f.name in int_fields else raw)
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            setattr(cfg, f.name, flag)
    return cfg


def _parse_schedule(text: str, k: int):
    if not text:
        return [(Fraction(1), Fraction(1))] * k
    pairs = []
    for part in text.split(","):
        a, b = part.split(":")
        pairs.append((parse_rational(a), parse_rational(b)))
    return pairs


def cmd_construct(cfg: RunConfig) -> int:
    out = cfg.out or f"{cfg.mode}_k{cfg.k}.json"
    if cfg.mode == "symmetric":
        build = build_symmetric(cfg.k, cfg.eps_value)
    elif cfg.mode == "adaptive":
        result = build_adaptive(make_choice(cfg.algo), cfg.k, cfg.eps_value, cfg.budget_value)
        if isinstance(result, UnboundedWitness):
            witness_path = Path(out).with_suffix(".witness.json")
            witness_path.write_text(json.dumps(result.to_jsonable(), indent=1, sort_keys=True) + "\n")
            print(f"no flip gap at level {result.level}: constant {result.side.value}; "
                  f"witness written to {witness_path}")
            return EXIT_UNBOUNDED
        build = result
    elif cfg.mode == "randomized":
        build = build_randomized(_parse_schedule(cfg.schedule, cfg.k), cfg.k)
    else:
        raise UsageError(f"unknown mode {cfg.mode!r}")
    build.instance.save(out)
    xs = ", ".join(format_rational(x) for x in build.ledger.xs)
    print(f"{cfg.mode} instance k={cfg.k}: {len(build.instance.servers)} servers, "
          f"{len(build.instance.requests)} requests -> {out}")
    print(f"ledger x = ({xs})")
    return EXIT_OK


def _bound_for(instance: Instance) -> Optional[Fraction]:
    meta = instance.meta.get("ledger")
    if not meta:
        return None
    ledger = GapLedger.from_meta(meta)
    if ledger.mode == "symmetric":
        return symmetric_ratio(ledger.k)
    if ledger.mode == "adaptive":
        return ratio_bound_deterministic(ledger.xs)
    if ledger.mode == "randomized":
        xs = list(ledger.xs)
        xs[-1] = Fraction(0)  # top-level accounting convention for the bound
        return ratio_bound_randomized(xs)
    return None


def _csv_append(path: str, row: dict) -> None:
    file = Path(path)
    new = not file.exists()
    with file.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if new:
            writer.writeheader()
        writer.writerow(row)


def _run_row(instance: Instance, selector: str, trials: int, seed: int) -> dict:
    meta = instance.meta.get("ledger", {})
    mode = meta.get("mode", "unknown")
    k = len(meta.get("x", [])) or 0
    eps = meta.get("eps", "")
    bound = _bound_for(instance)
    if is_randomized(selector):
        mc = monte_carlo_ratio(lambda: make_algorithm(selector), instance, trials, seed)
        ratio, mean, stderr, used_trials = mc.mean, mc.mean_float, mc.stderr, trials
    else:
        trace = run_online(make_algorithm(selector), instance)
        opt = optimal_cost(instance.servers, instance.requests)
        ratio = trace.total_cost / opt
        mean, stderr, used_trials = float(ratio), 0.0, 1
    return {
        "mode": mode,
        "algorithm": selector,
        "k": k,
        "eps": eps,
        "ratio_num": ratio.numerator,
        "ratio_den": ratio.denominator,
        "bound_num": bound.numerator if bound is not None else "",
        "bound_den": bound.denominator if bound is not None else "",
        "trials": used_trials,
        "mean": f"{mean:.15g}",
        "stderr": f"{stderr:.15g}",
        "note": "",
    }


def cmd_run(cfg: RunConfig) -> int:
    if not cfg.infile:
        raise UsageError("run needs --in <instance.json>")
    instance = Instance.load(cfg.infile)
    row = _run_row(instance, cfg.algo, cfg.trials, cfg.seed)
    if cfg.out:
        _csv_append(cfg.out, row)
    ratio = Fraction(row["ratio_num"], row["ratio_den"])
    print(f"{cfg.algo} on {cfg.infile}: ratio = {format_rational(ratio)} (= {float(ratio):.15g})")
    if row["bound_num"] != "":
        bound = Fraction(row["bound_num"], row["bound_den"])
        print(f"bound = {format_rational(bound)} (= {float(bound):.15g})")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.suite == "all":
        names = list(VERIFY_SUITES)
    elif cfg.suite in VERIFY_SUITES:
        names = [cfg.suite]
    else:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from {', '.join(VERIFY_SUITES)} or all")
    failed = False
    for name in names:
        runner = VERIFY_SUITES[name]
        report = runner(cfg.cases) if cfg.cases else runner()
        print(report.summary())
        if not report.passed:
            failed = True
            json.dump(report.failures[:5], sys.stderr, indent=1, default=str)
            sys.stderr.write("\n")
    return 1 if failed else EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    algos = [a.strip() for a in (cfg.algos or cfg.algo).split(",") if a.strip()]
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for selector in algos:
        for k in range(cfg.k_min, cfg.k_max + 1):
            local = RunConfig(**{f.name: getattr(cfg, f.name) for f in fields(RunConfig)})
            local.k = k
            try:
                if cfg.mode == "symmetric":
                    build = build_symmetric(k, cfg.eps_value)
                elif cfg.mode == "adaptive":
                    result = build_adaptive(make_choice(selector), k, cfg.eps_value, cfg.budget_value)
                    if isinstance(result, UnboundedWitness):
                        rows.append({"mode": cfg.mode, "algorithm": selector, "k": k, "eps": cfg.eps,
                                     "ratio_num": "", "ratio_den": "", "bound_num": "", "bound_den": "",
                                     "trials": 0, "mean": "", "stderr": "",
                                     "note": f"unbounded witness at level {result.level}"})
                        continue
                    build = result
                elif cfg.mode == "randomized":
                    build = build_randomized(_parse_schedule(cfg.schedule, k), k)
                else:
                    raise UsageError(f"unknown mode {cfg.mode!r}")
                rows.append(_run_row(build.instance, selector, cfg.trials, cfg.seed))
            except (ContractViolationError, ValueError, RuntimeError) as exc:
                rows.append({"mode": cfg.mode, "algorithm": selector, "k": k, "eps": cfg.eps,
                             "ratio_num": "", "ratio_den": "", "bound_num": "", "bound_den": "",
                             "trials": 0, "mean": "", "stderr": "", "note": str(exc)})
    rows.sort(key=lambda r: (r["algorithm"], r["k"]))
    csv_path = out_dir / "sweep.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    for selector in algos:
        safe = selector.replace(":", "_").replace("/", "_")
        with (out_dir / f"{safe}.dat").open("w") as fh:
            for row in rows:
                if row["algorithm"] == selector and row["mean"] != "":
                    fh.write(f"{row['k']} {row['mean']}\n")
    print(f"sweep: {len(rows)} cells -> {csv_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linematch",
                                     description="online matching on the line: constructions, runs, verification")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value config file; flags override")
        p.add_argument("--mode", choices=["symmetric", "adaptive", "randomized"])
        p.add_argument("--algo", help="greedy | wfa | tnet:<num/den> | harmonic | biased:<num/den>")
        p.add_argument("--k", type=int)
        p.add_argument("--eps", help="rational num/den")
        p.add_argument("--budget", help="flip-gap search budget, rational")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")

    p_construct = sub.add_parser("construct", help="build an instance file")
    add_common(p_construct)
    p_construct.add_argument("--schedule", help="randomized gaps a1:b1,a2:b2,...")

    p_run = sub.add_parser("run", help="run one algorithm on an instance file")
    add_common(p_run)
    p_run.add_argument("--in", dest="infile", help="instance JSON")

    p_verify = sub.add_parser("verify", help="run property suites")
    p_verify.add_argument("--config", help="key=value config file; flags override")
    p_verify.add_argument("--suite", help=f"{', '.join(VERIFY_SUITES)} or all")
    p_verify.add_argument("--cases", type=int, help="override case count")

    p_sweep = sub.add_parser("sweep", help="grid of (algorithm, k) cells")
    add_common(p_sweep)
    p_sweep.add_argument("--algos", help="comma-separated selectors")
    p_sweep.add_argument("--k-min", dest="k_min", type=int)
    p_sweep.add_argument("--k-max", dest="k_max", type=int)
    p_sweep.add_argument("--out-dir", dest="out_dir")
    p_sweep.add_argument("--schedule")
    return parser


COMMANDS = {
    "construct": cmd_construct,
    "run": cmd_run,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContractViolationError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
