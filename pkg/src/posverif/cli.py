"""Command line experiment runner.

Subcommands reproduce the headline numbers: completeness sweeps honest
prover positions, attack estimates adversary acceptance, nonlocal plays
the two-referee game and its 2-of-2 reduction, poq runs the timing-free
protocol for quantum and classical provers, and trace dumps one run's
event log.

Every row carries its closed-form expectation and a Wilson 95 percent
interval; the process exits 0 when every row's interval covers its
expectation, 1 when any row misses, and 2 on configuration errors.
Outputs are deterministic for a fixed configuration and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .adversary import ATTACK_NAMES, make_attack
from .errors import ConfigInvalid, PosverifError
from .nonlocal_game import (
    STRATEGIES,
    estimate_2of2_rate,
    estimate_win_rate,
    make_strategy,
    reduce_to_2of2,
)
from .protocol import (
    ClassicalPoQProver,
    ClassicalProver,
    HonestProver,
    ProtocolConfig,
    QuantumPoQProver,
    poq_transform,
    run_prpv,
    run_roprpv,
)
from .puzzle import BasePuzzle
from .rng import child_seed
from .stats import (
    classical_prover_rate,
    guessing_rate,
    honest_completeness,
    honest_to_b_rate,
    measure_and_guess_rate,
    reduction_slack,
    teleport_rate,
    uniform_equation_rate,
    wilson_interval,
)

DEFAULT_SEED = 27182
DEFAULT_TRIALS = 1000
ENV_SEED = "POSVERIF_SEED"

SWEEP_POSITIONS = (
    Fraction(1),
    Fraction(5, 4),
    Fraction(3, 2),
    Fraction(7, 4),
    Fraction(199, 100),
)

CSV_HEADER = "experiment,n,k,trials,successes,rate,ci_low,ci_high,theory,pass"


@dataclass(frozen=True)
class Row:
    experiment: str
    n: int
    k: int
    trials: int
    successes: int
    rate: float
    ci_low: float
    ci_high: float
    theory: float | None
    passed: bool


def coverage_row(experiment: str, n: int, k: int, successes: int,
                 trials: int, theory: float | None) -> Row:
    low, high = wilson_interval(successes, trials)
    passed = theory is None or low <= theory <= high
    return Row(experiment, n, k, trials, successes, successes / trials,
               low, high, theory, passed)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.12g}"


def format_csv(rows: list[Row]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            r.experiment, str(r.n), str(r.k), str(r.trials), str(r.successes),
            _fmt(r.rate), _fmt(r.ci_low), _fmt(r.ci_high), _fmt(r.theory),
            "true" if r.passed else "false",
        ]))
    return "\n".join(lines) + "\n"


def format_json(rows: list[Row]) -> str:
    payload = [
        {
            "experiment": r.experiment, "n": r.n, "k": r.k,
            "trials": r.trials, "successes": r.successes, "rate": r.rate,
            "ci_low": r.ci_low, "ci_high": r.ci_high, "theory": r.theory,
            "pass": r.passed,
        }
        for r in rows
    ]
    return json.dumps({"rows": payload}, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Tallying (optionally across processes)


def _tally_range(args):
    config, hashed, actor_kind, actor_name, seed, start, stop = args
    runner = run_roprpv if hashed else run_prpv
    prover = adversaries = None
    if actor_kind == "honest":
        prover = HonestProver()
    elif actor_kind == "classical":
        prover = ClassicalProver()
    else:
        adversaries = make_attack(actor_name, config)
    successes = 0
    reasons: dict[str, int] = {}
    for i in range(start, stop):
        outcome = runner(config, child_seed(seed, i), prover=prover,
                         adversaries=adversaries)
        if outcome.verdict.accept:
            successes += 1
        else:
            key = outcome.verdict.reason.value
            reasons[key] = reasons.get(key, 0) + 1
    return successes, reasons


def _tally(config: ProtocolConfig, hashed: bool, actor_kind: str,
           actor_name: str | None, trials: int, seed: int, workers: int):
    """Per-trial seeds are global indices, so any worker split sums to
    the same totals as a serial run."""
    if workers <= 1 or trials < 2 * workers:
        return _tally_range((config, hashed, actor_kind, actor_name, seed,
                             0, trials))
    step = -(-trials // workers)
    chunks = [(config, hashed, actor_kind, actor_name, seed, lo,
               min(lo + step, trials)) for lo in range(0, trials, step)]
    successes = 0
    reasons: dict[str, int] = {}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part_successes, part_reasons in pool.map(_tally_range, chunks):
            successes += part_successes
            for key, count in part_reasons.items():
                reasons[key] = reasons.get(key, 0) + count
    return successes, reasons


# ---------------------------------------------------------------------------
# Experiments


def completeness_rows(n: int, k: int, lam: int, trials: int, seed: int,
                      positions, workers: int, hashed: bool) -> list[Row]:
    theory = honest_completeness(n, k)
    rows = []
    for index, position in enumerate(positions):
        config = ProtocolConfig(n=n, k=k, lam=lam, prover_position=position)
        successes, _ = _tally(config, hashed, "honest", None, trials,
                              child_seed(seed, index), workers)
        label = f"completeness@{position}"
        rows.append(coverage_row(label, n, k, successes, trials, theory))
    return rows


def attack_rows(name: str, n: int, k: int, lam: int, trials: int, seed: int,
                workers: int) -> list[Row]:
    config = ProtocolConfig(n=n, k=k, lam=lam)
    make_attack(name, config)  # fail fast on unknown names and bad budgets
    theory = {
        "guess": guessing_rate(n, k),
        "forward_compiled_guess": guessing_rate(n, k),
        "teleport": teleport_rate(n, k),
        "classical_forward": classical_prover_rate(n, k),
    }[name]
    successes, _ = _tally(config, False, "attack", name, trials, seed, workers)
    return [coverage_row(f"attack_{name}", n, k, successes, trials, theory)]


_GAME_THEORY = {
    "honest_to_B": honest_to_b_rate,
    "measure_and_guess": measure_and_guess_rate,
    "brute_force": lambda n: 1.0,
    "always_fail": lambda n: 0.0,
}

_REDUCED_THEORY = {
    "honest_to_B": uniform_equation_rate,
    "measure_and_guess": uniform_equation_rate,
    "brute_force": lambda n: 1.0,
    "always_fail": lambda n: 0.0,
}


def nonlocal_rows(name: str, n: int, trials: int, seed: int) -> list[Row]:
    strategy = make_strategy(name, n)
    puz = BasePuzzle(n)
    tau = estimate_win_rate(puz, strategy, trials, child_seed(seed, 0))
    solver = reduce_to_2of2(make_strategy(name, n))
    reduced = estimate_2of2_rate(puz, solver, trials, child_seed(seed, 1))
    sigma = reduction_slack(reduced.rate, reduced.trials, tau.rate, tau.trials)
    bound = 2 * tau.rate - 1 - 5 * sigma
    rows = [
        coverage_row(f"game_{name}", n, 1, tau.successes, tau.trials,
                     _GAME_THEORY[name](n)),
        coverage_row(f"reduced_{name}", n, 1, reduced.successes,
                     reduced.trials, _REDUCED_THEORY[name](n)),
        Row(f"reduction_bound_{name}", n, 1, reduced.trials,
            reduced.successes, reduced.rate, reduced.ci_low, reduced.ci_high,
            bound, reduced.rate >= bound),
    ]
    return rows


def poq_rows(n: int, k: int, trials: int, seed: int) -> list[Row]:
    poq = poq_transform(ProtocolConfig(n=n, k=k))
    quantum_seed = child_seed(seed, 0)
    classical_seed = child_seed(seed, 1)
    quantum_wins = 0
    order_ok = 0
    for i in range(trials):
        result = poq.run(QuantumPoQProver, child_seed(quantum_seed, i))
        quantum_wins += result.accept
        order_ok += [label for label, _ in result.transcript] == ["pk", "y",
                                                                  "b", "ans"]
    classical_wins = sum(
        poq.run(ClassicalPoQProver, child_seed(classical_seed, i)).accept
        for i in range(trials))
    return [
        coverage_row("poq_quantum", n, k, quantum_wins, trials,
                     honest_completeness(n, k)),
        coverage_row("poq_classical", n, k, classical_wins, trials,
                     classical_prover_rate(n, k)),
        coverage_row("poq_order", n, k, order_ok, trials, 1.0),
    ]


def trace_lines(n: int, k: int, lam: int, seed: int, position: Fraction,
                attack_name: str | None, hashed: bool) -> str:
    config = ProtocolConfig(n=n, k=k, lam=lam, prover_position=position)
    runner = run_roprpv if hashed else run_prpv
    if attack_name is None:
        outcome = runner(config, seed, prover=HonestProver(),
                         record_trace=True)
    else:
        outcome = runner(config, seed,
                         adversaries=make_attack(attack_name, config),
                         record_trace=True)
    return outcome.trace.to_json_lines()


# ---------------------------------------------------------------------------
# Option resolution


CONFIG_KEYS = {"n", "k", "lambda", "trials", "seed", "pos", "name", "format",
               "workers", "out", "hashed"}


def load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigInvalid(
                        f"{path}:{lineno}: expected key=value, got {line!r}"
                    )
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in CONFIG_KEYS:
                    raise ConfigInvalid(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = value.strip()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config file {path}: {exc}") from exc
    return values


def _to_int(value, label: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigInvalid(f"{label} must be an integer, got {value!r}") from None


def _to_bool(value, label: str) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes"):
        return True
    if text in ("0", "false", "no"):
        return False
    raise ConfigInvalid(f"{label} must be a boolean, got {value!r}")


def _to_position(value, label: str) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise ConfigInvalid(f"{label} must be a rational, got {value!r}") from None


class _Options:
    """Flag > config file > environment (seed only) > default."""

    def __init__(self, args: argparse.Namespace):
        self._args = vars(args)
        self._file = (load_config_file(args.config)
                      if getattr(args, "config", None) else {})

    def raw(self, key: str, file_key: str | None = None):
        flag = self._args.get(key)
        if flag is not None:
            return flag
        return self._file.get(file_key or key)

    def integer(self, key: str, default: int, file_key: str | None = None) -> int:
        raw = self.raw(key, file_key)
        return default if raw is None else _to_int(raw, key)

    def seed(self) -> int:
        raw = self.raw("seed")
        if raw is None:
            raw = os.environ.get(ENV_SEED)
        return DEFAULT_SEED if raw is None else _to_int(raw, "seed")

    def text(self, key: str, default: str | None = None):
        raw = self.raw(key)
        return default if raw is None else str(raw)

    def boolean(self, key: str, default: bool = False) -> bool:
        raw = self.raw(key)
        return default if raw is None else _to_bool(raw, key)


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--n", type=int, default=None,
                        help="puzzle width (default 8)")
    shared.add_argument("--k", type=int, default=None,
                        help="parallel instances (default 1)")
    shared.add_argument("--lambda", dest="lam", type=int, default=None,
                        help="nonce width for the hash-challenge variant")
    shared.add_argument("--trials", type=int, default=None,
                        help=f"runs per row (default {DEFAULT_TRIALS})")
    shared.add_argument("--seed", type=int, default=None,
                        help=f"master seed (default ${ENV_SEED} or {DEFAULT_SEED})")
    shared.add_argument("--config", default=None,
                        help="key=value file supplying defaults for any flag")
    shared.add_argument("--out", default=None,
                        help="write output to this file instead of stdout")
    shared.add_argument("--format", choices=("csv", "json"), default=None,
                        help="row output format (default csv)")
    shared.add_argument("--workers", type=int, default=None,
                        help="worker processes for trial loops (default 1)")

    parser = argparse.ArgumentParser(
        prog="posverif",
        description="Seeded experiments for the timed verification protocol.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    completeness = sub.add_parser(
        "completeness", parents=[shared],
        help="honest acceptance across prover positions")
    completeness.add_argument("--pos", default=None,
                              help="single prover position (rational), "
                                   "default sweeps the segment")
    completeness.add_argument("--hashed", action="store_true", default=None,
                              help="use the hash-challenge variant")

    attack = sub.add_parser("attack", parents=[shared],
                            help="two-device attack acceptance")
    attack.add_argument("--name", default=None,
                        help=f"attack name, one of {', '.join(ATTACK_NAMES)}")

    game = sub.add_parser("nonlocal", parents=[shared],
                          help="two-referee game and 2-of-2 reduction")
    game.add_argument("--name", default=None,
                      help=f"strategy name, one of {', '.join(sorted(STRATEGIES))}")

    sub.add_parser("poq", parents=[shared],
                   help="timing-free protocol: quantum vs classical provers")

    trace = sub.add_parser("trace", parents=[shared],
                           help="event log of a single seeded run")
    trace.add_argument("--pos", default=None,
                       help="prover position (rational, default 3/2)")
    trace.add_argument("--name", default=None,
                       help="trace an attack pair instead of the honest prover")
    trace.add_argument("--hashed", action="store_true", default=None,
                       help="use the hash-challenge variant")

    return parser


def _emit(text: str, out_path: str | None):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _Options(args)
        n = opts.integer("n", 8)
        k = opts.integer("k", 1)
        lam = opts.integer("lam", 16, file_key="lambda")
        trials = opts.integer("trials", DEFAULT_TRIALS)
        seed = opts.seed()
        workers = opts.integer("workers", 1)
        if workers < 1:
            raise ConfigInvalid(f"workers must be >= 1, got {workers}")
        out_path = opts.text("out")
        fmt = opts.text("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigInvalid(f"format must be csv or json, got {fmt!r}")

        if args.command == "completeness":
            pos = opts.raw("pos")
            positions = (SWEEP_POSITIONS if pos is None
                         else (_to_position(pos, "pos"),))
            rows = completeness_rows(n, k, lam, trials, seed, positions,
                                     workers, opts.boolean("hashed"))
        elif args.command == "attack":
            name = opts.text("name")
            if name is None:
                raise ConfigInvalid("attack requires --name")
            rows = attack_rows(name, n, k, lam, trials, seed, workers)
        elif args.command == "nonlocal":
            name = opts.text("name")
            if name is None:
                raise ConfigInvalid("nonlocal requires --name")
            rows = nonlocal_rows(name, n, trials, seed)
        elif args.command == "poq":
            rows = poq_rows(n, k, trials, seed)
        else:
            position = _to_position(opts.raw("pos") or "3/2", "pos")
            text = trace_lines(n, k, lam, seed, position, opts.text("name"),
                               opts.boolean("hashed"))
            _emit(text, out_path)
            return 0

        text = format_json(rows) if fmt == "json" else format_csv(rows)
        _emit(text, out_path)
        return 0 if all(r.passed for r in rows) else 1
    except PosverifError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
