#!/usr/bin/env python3
"""Reproduce the simulated-learner experiments on the synthetic insect task.

Writes into --out-dir:
  test_error_<policy>.csv   population test error vs teaching length
  alpha_robustness.csv      teacher/learner confidence-scale grid at length 15
  difficulty_<policy>.csv   per-step difficulty of the first 20 picks
"""

import argparse
from pathlib import Path

from crowdteach.datagen import VwHypothesisParams, VwParams, make_vw_problem
from crowdteach.harness import (
    PolicySpec,
    simulate_population,
    difficulty_curve,
    write_difficulty_csv,
    write_report_csv,
)

POLICIES = ("strict", "setcover", "random")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="vw-results")
    parser.add_argument("--seed", type=int, default=20)
    parser.add_argument("--learners", type=int, default=100)
    parser.add_argument("--std", type=float, default=0.12, help="per-axis feature std")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    problem = make_vw_problem(
        alpha=2.0,
        data_params=VwParams(cov_diag=(args.std**2, args.std**2)),
        hypothesis_params=VwHypothesisParams(per_cluster=12),
        seed=args.seed,
    )
    print(f"pool={len(problem.teaching_set)} hypotheses={problem.n_hypotheses}")

    lengths = [0, 5, 10, 15, 20]
    for name in POLICIES:
        spec = PolicySpec(name=name, epsilon=0.001, teacher_alpha=2.0, seed=101)
        report = simulate_population(
            problem, spec, lengths, args.learners, [2.0, 3.0, 4.0], master_seed=1
        )
        write_report_csv(report, out / f"test_error_{name}.csv")
        means = {L: round(report.mean_error_at(L), 4) for L in lengths}
        print(f"{name:9s} mean test error by length: {means}")

        sequence = spec.run(problem, max_len=20)
        write_difficulty_csv(
            difficulty_curve(problem, sequence.example_ids), out / f"difficulty_{name}.csv"
        )

    rows = []
    for teacher_alpha in (1.0, 2.0, 3.0, 4.0, 5.0):
        spec = PolicySpec(name="strict", epsilon=0.001, teacher_alpha=teacher_alpha, seed=101)
        report = simulate_population(
            problem, spec, [15], 150, [1.0, 2.0, 3.0], master_seed=1
        )
        rows.extend(report.rows)
    from crowdteach.harness import SimulationReport

    write_report_csv(SimulationReport(rows=rows), out / "alpha_robustness.csv")
    print(f"wrote results to {out}/")


if __name__ == "__main__":
    main()
