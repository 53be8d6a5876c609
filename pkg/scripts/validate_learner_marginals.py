#!/usr/bin/env python3
"""Check that rollout marginals track the posterior exactly.

For a generated problem and a greedy sequence, prints the total-variation
distance between the empirical distribution of the learner's hypothesis at
step t (over many independent rollouts) and the tracked posterior.
"""

import argparse

from crowdteach.datagen import VwHypothesisParams, make_vw_problem
from crowdteach.harness import lemma1_check
from crowdteach.teach import TeachConfig, strict_teach


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rollouts", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    problem = make_vw_problem(
        alpha=2.0, hypothesis_params=VwHypothesisParams(per_cluster=1), seed=args.seed
    )
    sequence = strict_teach(problem, TeachConfig(epsilon=0.01, max_len=6))
    print(f"sequence: {sequence.example_ids}")
    for t in (1, 3, 5):
        tv = lemma1_check(problem, sequence.example_ids, t, args.rollouts, seed=args.seed)
        print(f"t={t}: TV(empirical, posterior) = {tv:.5f}  ({args.rollouts} rollouts)")


if __name__ == "__main__":
    main()
