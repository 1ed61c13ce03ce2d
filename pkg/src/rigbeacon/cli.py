"""Command-line entry point.

Exit codes: 0 on success, 2 when inputs fail validation (bad parameters,
malformed scenario, timing violation, missing files), 3 when a run fails
at runtime (aborted session, availability failure).
"""

from __future__ import annotations

import argparse
import csv
import glob
import hashlib
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .beacon.common import BeaconResult
from .equilibria import MAX_ORACLE_DIM, kernel_uniqueness_check, support_enumeration_ne, verify_uniform_is_ne
from .errors import InvalidParameters, RigError, ScenarioError, TimingViolation
from .game import build_matrix, check_dense_params
from .group import keygen, toy_group
from .pvss import decrypt_share, deal, reconstruct, verify_deal, verify_share
from .sim.agents import AgentStrategy
from .sim.batch import iter_scenario
from .sim.epochs import frequency_table, run_epochs
from .sim.scenario import load_scenario
from .sim.stats import chi_square_uniformity

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class _InputError(RigError):
    """Missing or unreadable command input."""


def _dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _frac(x: Fraction) -> str:
    return str(x)


class Outputs:
    """Writes artifacts into one directory and records their digests for the manifest."""

    def __init__(self, out: str | Path):
        self.dir = Path(out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.artifacts: list[dict[str, str]] = []

    def write(self, name: str, text: str) -> Path:
        path = self.dir / name
        data = text.encode("utf-8")
        path.write_bytes(data)
        self.artifacts.append({"path": name, "sha256": hashlib.sha256(data).hexdigest()})
        return path

    def manifest(self, command: str, argv: Sequence[str], seed: int | None, scenario: str | None) -> Path:
        doc: dict[str, Any] = {
            "command": command,
            "argv": list(argv),
            "seed": seed,
            "output_dir": str(self.dir),
            "scenario": scenario,
            "artifacts": self.artifacts,
        }
        if scenario is not None:
            doc["scenario_sha256"] = hashlib.sha256(Path(scenario).read_bytes()).hexdigest()
        path = self.dir / "manifest.json"
        path.write_text(_dumps(doc), encoding="utf-8")
        return path


def game_report(m: int, f: int) -> dict[str, Any]:
    check_dense_params(m, f)
    matrix = build_matrix((m, f))
    ne = verify_uniform_is_ne(matrix)
    kernel = kernel_uniqueness_check(matrix)
    report: dict[str, Any] = {
        "m": m,
        "f": f,
        "density": _frac(Fraction(2 * f, m)),
        "matrix": [list(r) for r in matrix.entries],
        "uniform_is_ne": {
            "ok": ne.ok,
            "row_values": [_frac(v) for v in ne.row_values],
            "column_values": [_frac(v) for v in ne.column_values],
            "value": _frac(ne.value),
        },
        "kernel": {"unique": kernel.unique, "rank": kernel.rank, "dimension": kernel.kernel_dimension},
    }
    if m <= min(5, MAX_ORACLE_DIM):
        eqs = support_enumeration_ne(matrix)
        report["support_enumeration"] = [[[_frac(p) for p in x], [_frac(p) for p in y]] for x, y in sorted(eqs)]
    unique = kernel.unique and ne.ok
    report["verdict"] = "unique NE: uniform" if unique else "uniform NE not certified unique"
    return report


def cmd_game_analyze(args: argparse.Namespace) -> int:
    report = game_report(args.m, args.f)
    matrix = build_matrix((args.m, args.f))
    text = f"B^({args.m},{args.f}), density {report['density']}\n{matrix}\n{report['verdict']}\n"
    sys.stdout.write(text)
    if args.out:
        out = Outputs(args.out)
        out.write("game_report.json", _dumps(report))
        out.write("matrix.txt", text)
        out.manifest("game-analyze", args.argv, None, None)
    return EXIT_OK


def cmd_beacon_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    seed = scenario.seed if args.seed is None else args.seed
    out = Outputs(args.out)
    transcript, results = io.StringIO(), io.StringIO()
    confiscations = 0
    last: BeaconResult | None = None
    for run in iter_scenario(scenario, seed):
        transcript.write(run.transcript_text())
        results.write(run.result.dumps() + "\n")
        confiscations += len(run.result.confiscated)
        last = run.result
    out.write("transcript.jsonl", transcript.getvalue())
    out.write("results.jsonl", results.getvalue())
    out.manifest("beacon-run", args.argv, seed, args.scenario)
    assert last is not None
    print(
        f"{scenario.sessions} session(s) of {scenario.variant}; last v={last.v} v~={last.v_tilde}; "
        f"confiscations={confiscations}"
    )
    return EXIT_OK


def cmd_pvss_demo(args: argparse.Namespace) -> int:
    group = toy_group()
    seed = args.seed or 0
    n, t, m = 5, 3, 16
    kps = [keygen(group, ("pvss-demo", seed, i)) for i in range(1, n + 1)]
    pubkeys = [kp.public for kp in kps]
    s = seed % m
    lines = [f"group: p={group.p} q={group.q} g={group.g} G={group.G}"]
    lines.append(f"public keys: {pubkeys}")
    bundle = deal(group, s, n, t, pubkeys, ("pvss-demo", seed), m)
    lines.append(f"dealt secret s={s}; U={bundle.U}; commitments={list(bundle.commitments)}")
    lines.append(f"encrypted shares: {list(bundle.shares)}")
    lines.append(f"verify_deal: {verify_deal(group, bundle, pubkeys)}")
    shares = [decrypt_share(group, bundle, i, kps[i - 1], pubkeys) for i in range(1, n + 1)]
    for sh in shares:
        lines.append(f"share {sh.index}: S={sh.S} verified={verify_share(group, bundle, sh, pubkeys)}")
    got = reconstruct(group, shares[:t], bundle, t, pubkeys)
    lines.append(f"reconstructed from shares 1..{t}: {got}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        out = Outputs(args.out)
        out.write("pvss_demo.txt", text)
        out.manifest("pvss-demo", args.argv, seed, None)
    return EXIT_OK


def _load_results(pattern: str) -> list[BeaconResult]:
    paths = sorted(glob.glob(pattern, recursive=True))
    if not paths:
        raise _InputError(f"no result files match {pattern!r}")
    results = []
    for p in paths:
        for line in Path(p).read_text(encoding="utf-8").splitlines():
            if line.strip():
                results.append(BeaconResult.loads(line))
    if not results:
        raise _InputError(f"result files matching {pattern!r} are empty")
    return results


def stats_table(results: Sequence[BeaconResult], m: int, alpha: float) -> tuple[str, dict[str, Any]]:
    b_values = {1 << r.b for r in results}
    m_values = {r.m for r in results}
    if m_values == {m}:
        field, samples = "v", [r.v for r in results]
    elif b_values == {m}:
        field, samples = "v_tilde", [r.v_tilde for r in results]
    else:
        raise InvalidParameters(f"--m {m} matches neither the results' m {sorted(m_values)} nor 2^b {sorted(b_values)}")
    test = chi_square_uniformity(samples, m, alpha)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bucket", "count", "expected"])
    for j, c in enumerate(test.counts):
        w.writerow([j, c, f"{test.n / m:.4f}"])
    summary = {
        "sessions": len(results),
        "field": field,
        "m": m,
        "alpha": alpha,
        "statistic": test.statistic,
        "critical": test.critical,
        "df": test.df,
        "passed": test.passed,
        "payoff_total": sum(sum(r.payoffs.values()) for r in results),
        "reward_total": sum(sum(r.rewards.values()) for r in results),
        "confiscated_total": sum(sum(r.confiscated.values()) for r in results),
        "confiscations": sum(len(r.confiscated) for r in results),
    }
    return buf.getvalue(), summary


def cmd_stats(args: argparse.Namespace) -> int:
    results = _load_results(args.results)
    table, summary = stats_table(results, args.m, args.alpha)
    verdict = "pass" if summary["passed"] else "FAIL"
    sys.stdout.write(table)
    print(
        f"chi-square on {summary['field']}: {summary['statistic']:.3f} vs critical "
        f"{summary['critical']:.3f} (df={summary['df']}, alpha={args.alpha}) -> {verdict}"
    )
    print(
        f"payoff total {summary['payoff_total']}, reward total {summary['reward_total']}, "
        f"confiscations {summary['confiscations']}"
    )
    if args.out:
        out = Outputs(args.out)
        out.write("stats.csv", table)
        out.write("stats.json", _dumps(summary))
        out.manifest("stats", args.argv, None, None)
    return EXIT_OK


def cmd_epochs(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if scenario.epochs is None:
        raise ScenarioError("epochs", "missing")
    seed = scenario.seed if args.seed is None else args.seed
    spec = scenario.epochs
    strategies = scenario.agents

    def factory(party: int, slot: int):
        return strategies[party] if party < len(strategies) else AgentStrategy()

    run = run_epochs(spec.initial_seed, spec.stakes, spec.count, scenario, factory, spec.roster_size, seed)
    seeds = io.StringIO()
    w = csv.writer(seeds, lineterminator="\n")
    w.writerow(["epoch", "seed", "next_seed", "roster"])
    for state, result in zip(run.states, run.results):
        w.writerow([state.epoch, state.seed, result.v_tilde, " ".join(map(str, state.roster))])
    freq = io.StringIO()
    w = csv.writer(freq, lineterminator="\n")
    w.writerow(["party", "stake", "share", "selections", "frequency"])
    for row in frequency_table(run, spec.stakes):
        w.writerow([row["party"], row["stake"], f"{row['share']:.6f}", row["selections"], f"{row['frequency']:.6f}"])
    sys.stdout.write(freq.getvalue())
    out = Outputs(args.out)
    out.write("seeds.csv", seeds.getvalue())
    out.write("frequencies.csv", freq.getvalue())
    out.manifest("epochs", args.argv, seed, args.scenario)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rigbeacon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("game-analyze", help="matrix, equilibrium and kernel report for one (m, f)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--f", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_game_analyze)

    p = sub.add_parser("beacon-run", help="run the sessions of a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_beacon_run)

    p = sub.add_parser("pvss-demo", help="deal, verify and reconstruct on the toy group")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pvss_demo)

    p = sub.add_parser("stats", help="chi-square uniformity and payoff totals over result files")
    p.add_argument("results", help="glob of results.jsonl files")
    p.add_argument("--m", type=int, required=True, help="bucket count: the results' m (tests v) or 2^b (tests v~)")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("epochs", help="run the epoch loop of a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_epochs)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    args.argv = argv
    try:
        return args.func(args)
    except (InvalidParameters, ScenarioError, TimingViolation, _InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
