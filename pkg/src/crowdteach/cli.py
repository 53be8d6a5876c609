"""Command-line entry point.

Commands:
  generate vw   synthesize a two-Gaussian problem file
  teach         produce a teaching sequence file from a problem file
  simulate      population simulation -> CSV report
  lemma1        rollout-marginal validation, prints a total-variation gap
  serve         HTTP teach-then-test session service

Exit status: 0 success, 1 validation error (one-line diagnostic on stderr),
2 I/O error.  All commands are byte-deterministic given --seed.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .core import UsageError
from .datagen import VwHypothesisParams, VwParams, load_problem, make_vw_problem, save_problem
from .harness import PolicySpec, lemma1_check, simulate_population, write_report_csv
from .teach import load_sequence, save_sequence

PROBLEM_FORMAT_HELP = (
    "problem file: JSON {alpha, examples:[{id,x,y,asset?}], hypotheses:[{w,b}], "
    "prior, target_index, test_examples?}"
)
SEQUENCE_FORMAT_HELP = (
    "sequence file: JSON {policy, status, example_ids, per_step:[{F,gain,difficulty}]}"
)


class _Parser(argparse.ArgumentParser):
    """argparse that reports flag errors as validation errors (exit 1)."""

    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="crowdteach", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--seed", type=int, default=0, help="master seed (unsigned 64-bit)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="synthesize a problem file",
                         epilog=PROBLEM_FORMAT_HELP)
    gen.add_argument("kind", choices=["vw"], help="dataset family")
    gen.add_argument("--out", required=True, help="output problem file path")
    gen.add_argument("--alpha", type=float, default=2.0, help="learner confidence scale")
    gen.add_argument("--n-train", type=int, default=80, help="training examples per class")
    gen.add_argument("--n-test", type=int, default=20, help="test examples per class")
    gen.add_argument("--per-cluster", type=int, default=12,
                     help="hypotheses per angular cluster (8 clusters)")

    teach = sub.add_parser("teach", help="compute a teaching sequence",
                           epilog=f"{PROBLEM_FORMAT_HELP}\n{SEQUENCE_FORMAT_HELP}",
                           formatter_class=argparse.RawDescriptionHelpFormatter)
    teach.add_argument("--problem", required=True, help="problem file")
    teach.add_argument("--policy", required=True, choices=["strict", "setcover", "random", "rgtp"])
    teach.add_argument("--epsilon", type=float, default=0.05, help="target expected error")
    teach.add_argument("--alpha", type=float, default=None,
                       help="teacher's assumed confidence (default: the problem's)")
    teach.add_argument("--wo", type=float, default=0.5,
                       help="conservative inconsistency weight (rgtp)")
    teach.add_argument("--max-len", type=int, default=None, help="sequence length cap")
    teach.add_argument("--out", required=True, help="output sequence file path")

    sim = sub.add_parser("simulate", help="simulate a learner population",
                         epilog="report CSV columns: policy, teaching_length, learner_alpha, "
                                "teacher_alpha, n_learners, mean_test_error, std_test_error, seed")
    sim.add_argument("--problem", required=True, help="problem file")
    sim.add_argument("--policy", required=True, choices=["strict", "setcover", "random", "rgtp"])
    sim.add_argument("--lengths", required=True, help="comma-separated teaching lengths")
    sim.add_argument("--learners", type=int, default=100, help="population size")
    sim.add_argument("--learner-alphas", default="2,3,4",
                     help="comma-separated alphas assigned round-robin")
    sim.add_argument("--epsilon", type=float, default=0.001)
    sim.add_argument("--alpha", type=float, default=None, help="teacher's assumed confidence")
    sim.add_argument("--wo", type=float, default=0.5)
    sim.add_argument("--out", required=True, help="output CSV path")

    lem = sub.add_parser("lemma1", help="validate rollout marginals against the posterior")
    lem.add_argument("--problem", required=True)
    lem.add_argument("--sequence", required=True, help="sequence file")
    lem.add_argument("--step", type=int, required=True, help="step t to check")
    lem.add_argument("--rollouts", type=int, default=50000)

    srv = sub.add_parser("serve", help="run the teach-then-test session service",
                         epilog="each --sequence GROUP=PATH registers a control group; "
                                "the zero-teaching group 'none' is always available")
    srv.add_argument("--problem", required=True)
    srv.add_argument("--sequence", action="append", default=[], metavar="GROUP=PATH",
                     help="register a group's sequence file (repeatable)")
    srv.add_argument("--test-len", type=int, default=10, help="test items per session")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--assets-dir", default=None, help="static asset directory to mount")
    srv.add_argument("--labels", default="Positive,Negative",
                     help="display names for the +1 and -1 classes")
    srv.add_argument("--serve-features", action=argparse.BooleanOptionalAction, default=True,
                     help="include feature vectors in item payloads")
    srv.add_argument("--log", default=None, help="append-only answer log (JSON lines)")
    return parser


def _cmd_generate(args) -> int:
    problem = make_vw_problem(
        alpha=args.alpha,
        data_params=VwParams(n_train_per_class=args.n_train, n_test_per_class=args.n_test),
        hypothesis_params=VwHypothesisParams(per_cluster=args.per_cluster),
        seed=args.seed,
    )
    save_problem(problem, args.out)
    return 0


def _cmd_teach(args) -> int:
    problem = load_problem(args.problem)
    spec = PolicySpec(
        name=args.policy,
        epsilon=args.epsilon,
        teacher_alpha=args.alpha,
        w_o=args.wo,
        seed=args.seed,
    )
    max_len = args.max_len if args.max_len is not None else len(problem.teaching_set)
    sequence = spec.run(problem, max_len=max_len)
    save_sequence(sequence, args.out)
    return 0


def _parse_number_list(raw: str, flag: str, cast) -> list:
    try:
        return [cast(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {raw!r}")


def _cmd_simulate(args) -> int:
    problem = load_problem(args.problem)
    lengths = _parse_number_list(args.lengths, "--lengths", int)
    alphas = _parse_number_list(args.learner_alphas, "--learner-alphas", float)
    if not lengths:
        raise UsageError("--lengths must name at least one length")
    spec = PolicySpec(
        name=args.policy,
        epsilon=args.epsilon,
        teacher_alpha=args.alpha,
        w_o=args.wo,
        seed=args.seed,
    )
    report = simulate_population(
        problem,
        spec,
        lengths=lengths,
        n_learners=args.learners,
        learner_alphas=alphas,
        master_seed=args.seed,
    )
    write_report_csv(report, args.out)
    return 0


def _cmd_lemma1(args) -> int:
    problem = load_problem(args.problem)
    sequence = load_sequence(args.sequence)
    tv = lemma1_check(problem, sequence.example_ids, args.step, args.rollouts, args.seed)
    print(f"tv={tv!r}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServeConfig, create_app

    problem = load_problem(args.problem)
    groups = {}
    for entry in args.sequence:
        name, _, path = entry.partition("=")
        if not path:
            raise UsageError(f"--sequence expects GROUP=PATH, got {entry!r}")
        groups[name] = load_sequence(path)
    labels = args.labels.split(",")
    if len(labels) != 2:
        raise UsageError("--labels expects two comma-separated names")
    config = ServeConfig(
        problem=problem,
        groups={name: seq.example_ids for name, seq in groups.items()},
        test_len=args.test_len,
        serve_features=args.serve_features,
        label_names={1: labels[0].strip(), -1: labels[1].strip()},
        assets_dir=args.assets_dir,
        log_path=args.log,
    )
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_HANDLERS = {
    "generate": _cmd_generate,
    "teach": _cmd_teach,
    "simulate": _cmd_simulate,
    "lemma1": _cmd_lemma1,
    "serve": _cmd_serve,
}


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv and run one command; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        return _HANDLERS[args.command](args)
    except SystemExit as exc:  # --help exits 0 through here
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
