"""Command-line entry points.

    balar serve --port 8000 --fixtures fixtures/
    balar run --fixture fixtures/medical.json --out transcript.jsonl
    balar bench --policies mi,random --instances 200 --kmax 5 --seed 0 --out report/
    balar verify-theorem --corpus small --tolerance 1e-9
    balar verify-lemma --environments 100
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import Instance, LoopConfig, load_config
from .elicitation import ScriptedOracle, load_fixture
from .session import run_session
from .simbench import (
    BenchConfig,
    PolicySpec,
    check_lemma_monotonicity,
    check_theorem_bound,
    run_policy_comparison,
)

_POLICY_ALIASES = {"mi": "mi-greedy", "mi-greedy": "mi-greedy", "random": "random",
                   "fixed": "fixed-order", "fixed-order": "fixed-order"}

_CORPUS_SIZES = {"small": 54, "large": 120}


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(fixtures_dir=args.fixtures, transcript_dir=args.transcripts)
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    fixture = load_fixture(args.fixture)
    instance = Instance.from_dict(fixture["instance"])
    if args.config:
        config = load_config(args.config)
    else:
        config = LoopConfig.from_dict(fixture.get("config") or {})
    oracle = ScriptedOracle(fixture)
    answer, transcript = run_session(instance, oracle, oracle.user_answer, config)
    if args.out:
        transcript.write(args.out)
        print(f"transcript written to {args.out}")
    asks = len(transcript.of_kind("update"))
    expands = len(transcript.of_kind("expand"))
    print(f"status: {transcript.of_kind('converge')[-1].payload['status']}")
    print(f"rounds: {asks} ask, {expands} expand, {oracle.total_calls} elicitation calls")
    print(f"final answer: {answer}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    policies = []
    for name in args.policies.split(","):
        kind = _POLICY_ALIASES.get(name.strip())
        if kind is None:
            print(f"unknown policy {name!r}; choose from {sorted(_POLICY_ALIASES)}")
            return 2
        policies.append(PolicySpec(kind, seed=args.seed + len(policies)))
    cfg = BenchConfig(seed=args.seed, sharpness=args.sharpness, alpha=args.alpha)
    report = run_policy_comparison(policies, args.instances, args.kmax, cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    for name, arm in report.arms.items():
        lines = ["k\tmean\tstderr"]
        for k in range(report.k_max):
            lines.append(f"{k + 1}\t{arm.mean_gain[k]:.6f}\t{arm.stderr_gain[k]:.6f}")
        (out / f"gain_{name}.tsv").write_text("\n".join(lines) + "\n")

    for name, arm in report.arms.items():
        print(
            f"{name}: rounds {arm.mean_rounds:.2f} +/- {arm.stderr_rounds:.2f}, "
            f"recovery {arm.recovery_rate:.2%}, gain@{report.k_max} "
            f"{arm.mean_gain[-1]:.4f} +/- {arm.stderr_gain[-1]:.4f}"
        )
    if len(policies) >= 2:
        a, b = policies[0].name, policies[1].name
        print(f"paired difference {a} - {b}:")
        for row in report.paired_gain_difference(a, b):
            print(
                f"  k={row['k']}: {row['mean']:.4f} "
                f"(95% CI {row['ci95_low']:.4f} .. {row['ci95_high']:.4f})"
            )
    print(f"report written to {out}")
    return 0


def _cmd_verify_theorem(args: argparse.Namespace) -> int:
    count = _CORPUS_SIZES.get(args.corpus, None)
    if count is None:
        count = int(args.corpus)
    report = check_theorem_bound(count=count, tolerance=args.tolerance)
    for row in report.rows:
        flag = "ok" if row.satisfied else "VIOLATION"
        print(
            f"seed={row.seed} k={row.k}: greedy={row.greedy:.6f} "
            f"optimal={row.optimal:.6f} bound={row.bound:.6f} [{flag}]"
        )
    print(
        f"{len(report.rows)} checks, worst margin {report.worst_margin:.3e}, "
        f"{'PASS' if report.passed else 'FAIL'}"
    )
    return 0 if report.passed else 1


def _cmd_verify_lemma(args: argparse.Namespace) -> int:
    report = check_lemma_monotonicity(n_environments=args.environments, steps=args.steps)
    print(
        f"{report.checks} monotonicity checks across {args.environments} environments: "
        f"{report.violations} violations (worst excess {report.worst_excess:.3e})"
    )
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="balar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--fixtures", default=None, help="directory of scripted-oracle fixtures")
    serve.add_argument("--transcripts", default=None, help="write-through transcript directory")
    serve.add_argument("--log-level", default="warning")
    serve.set_defaults(func=_cmd_serve)

    run = sub.add_parser("run", help="run one scripted session headlessly")
    run.add_argument("--fixture", required=True)
    run.add_argument("--config", default=None, help="JSON loop-config file")
    run.add_argument("--out", default=None, help="transcript output path (JSON lines)")
    run.set_defaults(func=_cmd_run)

    bench = sub.add_parser("bench", help="paired policy comparison on synthetic instances")
    bench.add_argument("--policies", default="mi,random")
    bench.add_argument("--instances", type=int, default=200)
    bench.add_argument("--kmax", type=int, default=5)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--sharpness", type=float, default=0.9)
    bench.add_argument("--alpha", type=float, default=0.2)
    bench.add_argument("--out", default="bench-report")
    bench.set_defaults(func=_cmd_bench)

    theorem = sub.add_parser("verify-theorem", help="greedy (1 - 1/e) bound vs brute force")
    theorem.add_argument("--corpus", default="small", help='"small", "large", or a count')
    theorem.add_argument("--tolerance", type=float, default=1e-9)
    theorem.set_defaults(func=_cmd_verify_theorem)

    lemma = sub.add_parser("verify-lemma", help="conditional-MI monotonicity on CI environments")
    lemma.add_argument("--environments", type=int, default=100)
    lemma.add_argument("--steps", type=int, default=5)
    lemma.set_defaults(func=_cmd_verify_lemma)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
