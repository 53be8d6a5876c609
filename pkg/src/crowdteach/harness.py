"""Population simulations, marginal-distribution validation, and statistics.

Reproduces the simulated-learner experiments: teach a sequence with some
policy, roll out a population of learners whose confidence scales are
assigned round-robin from a configured set, and report test error per
(teaching length, learner alpha) group.  Rollouts use per-learner seed
streams derived from one master seed, so reports are identical under any
scheduling.  The number of worker threads is capped by CROWDTEACH_THREADS
(0 or unset picks the serial default).
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .core import TeachingProblem, UsageError, difficulty, new_tracker, normalized_posterior, update_tracker
from .learner import rollout
from .relaxed_greedy import RelaxedGreedyConfig, relaxed_greedy_teach
from .seeding import spawn_generators
from .teach import TeachConfig, TeachingSequence, random_teach, setcover_teach, strict_teach

POLICY_NAMES = ("strict", "setcover", "random", "rgtp")


def thread_count() -> int:
    """Worker threads for rollout fan-out; CROWDTEACH_THREADS caps it."""
    raw = os.environ.get("CROWDTEACH_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"CROWDTEACH_THREADS must be an integer, got {raw!r}")
    return n if n > 0 else 1


@dataclass(frozen=True)
class PolicySpec:
    """Which teacher to run and with what knobs."""

    name: str
    epsilon: float = 0.001
    teacher_alpha: Optional[float] = None
    w_o: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.name not in POLICY_NAMES:
            raise UsageError(f"unknown policy {self.name!r}; choose from {POLICY_NAMES}")

    def run(self, problem: TeachingProblem, max_len: int) -> TeachingSequence:
        if self.name == "strict":
            config = TeachConfig(
                epsilon=self.epsilon, max_len=max_len, teacher_alpha=self.teacher_alpha
            )
            return strict_teach(problem, config)
        if self.name == "setcover":
            return setcover_teach(problem, max_len, rng=self.seed)
        if self.name == "random":
            return random_teach(problem, max_len, rng=self.seed)
        sequence, _ = relaxed_greedy_teach(
            problem,
            RelaxedGreedyConfig(w_o=self.w_o, epsilon=self.epsilon, max_len=max_len),
            rng=self.seed,
        )
        return sequence


@dataclass(frozen=True)
class SimulationRow:
    policy: str
    teaching_length: int
    learner_alpha: float
    teacher_alpha: float
    n_learners: int
    mean_test_error: float
    std_test_error: float
    seed: int


@dataclass
class SimulationReport:
    rows: list[SimulationRow]

    def mean_error_at(self, length: int) -> float:
        """Population mean over all alpha groups at one teaching length."""
        rows = [r for r in self.rows if r.teaching_length == length]
        total = sum(r.n_learners for r in rows)
        return sum(r.mean_test_error * r.n_learners for r in rows) / total


def _rollout_errors(
    problem: TeachingProblem,
    sequence_ids: Sequence[str],
    alphas: Sequence[float],
    generators,
) -> np.ndarray:
    def one(i: int) -> float:
        learner_problem = problem.with_alpha(alphas[i])
        return rollout(learner_problem, sequence_ids, generators[i]).final_test_error

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.array(list(pool.map(one, range(len(alphas)))))
    return np.array([one(i) for i in range(len(alphas))])


def simulate_population(
    problem: TeachingProblem,
    policy: PolicySpec,
    lengths: Sequence[int],
    n_learners: int,
    learner_alphas: Sequence[float],
    master_seed: int,
) -> SimulationReport:
    """Teach once, then roll out a fresh population at each truncation length.

    Learner i always gets alpha learner_alphas[i % k] and its own seed
    stream, so length sweeps reuse common random numbers.  Rows aggregate
    per (length, alpha) group; std is the ddof=1 sample deviation.
    """
    if not problem.test_set:
        raise UsageError("population simulation needs a problem with a test set")
    horizon = max(lengths)
    if horizon > len(problem.teaching_set):
        raise UsageError("requested teaching length exceeds the pool size")
    if horizon > 0:
        sequence_ids = policy.run(problem, max_len=horizon).example_ids
    else:
        sequence_ids = []
    alphas = [float(learner_alphas[i % len(learner_alphas)]) for i in range(n_learners)]
    teacher_alpha = (
        policy.teacher_alpha if policy.teacher_alpha is not None else problem.alpha
    )
    rows = []
    for length in lengths:
        generators = spawn_generators(master_seed, n_learners)
        errors = _rollout_errors(problem, sequence_ids[:length], alphas, generators)
        for alpha in dict.fromkeys(alphas):
            group = errors[np.array(alphas) == alpha]
            rows.append(
                SimulationRow(
                    policy=policy.name,
                    teaching_length=int(length),
                    learner_alpha=alpha,
                    teacher_alpha=float(teacher_alpha),
                    n_learners=int(group.size),
                    mean_test_error=float(group.mean()),
                    std_test_error=float(group.std(ddof=1)) if group.size > 1 else 0.0,
                    seed=int(master_seed),
                )
            )
    return SimulationReport(rows=rows)


def lemma1_check(
    problem: TeachingProblem,
    sequence: Sequence[str],
    t: int,
    n_rollouts: int,
    seed: int,
) -> float:
    """Total-variation gap between rollout marginals and the exact posterior.

    Runs n_rollouts independent learners over the first t-1 examples and
    compares the empirical distribution of the step-t hypothesis with the
    tracked posterior after those examples.
    """
    if not 1 <= t <= len(sequence) + 1:
        raise UsageError("t must be within the sequence length + 1")
    prefix = list(sequence)[: t - 1]
    tracker = new_tracker(problem)
    for example_id in prefix:
        tracker = update_tracker(tracker, problem, example_id)
    exact = normalized_posterior(tracker)

    counts = np.zeros(problem.n_hypotheses)
    for gen in spawn_generators(seed, n_rollouts):
        trace = rollout(problem, prefix, gen)
        counts[trace.hypothesis_path[t - 1]] += 1
    empirical = counts / n_rollouts
    return float(0.5 * np.abs(empirical - exact).sum())


def difficulty_curve(problem: TeachingProblem, sequence: Sequence[str]) -> list[float]:
    """Difficulty of each pick under the belief state just before showing it."""
    tracker = new_tracker(problem)
    values = []
    for example_id in sequence:
        idx = problem.example_index(example_id)
        values.append(difficulty(tracker, problem, problem.teaching_set[idx]))
        tracker = update_tracker(tracker, problem, example_id)
    return values


@dataclass(frozen=True)
class WelchResult:
    t: float
    p_two_tailed: float
    df: float


def welch_t_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> WelchResult:
    """Welch's unequal-variance t statistic with Welch-Satterthwaite df.

    Two-tailed p-value from the t-distribution survival function.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise UsageError("each sample needs at least two observations")
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if va == 0 and vb == 0:
        raise UsageError("at least one sample must have nonzero variance")
    se_a, se_b = va / a.size, vb / b.size
    t = float((a.mean() - b.mean()) / np.sqrt(se_a + se_b))
    # scale-free Satterthwaite form: the shares are in [0, 1], so tiny
    # variances cannot underflow the squared terms
    share_a = se_a / (se_a + se_b)
    share_b = se_b / (se_a + se_b)
    df = float(1.0 / (share_a**2 / (a.size - 1) + share_b**2 / (b.size - 1)))
    p = float(2.0 * _scipy_stats.t.sf(abs(t), df))
    return WelchResult(t=t, p_two_tailed=p, df=df)


REPORT_COLUMNS = [f.name for f in fields(SimulationRow)]


def write_report_csv(report: SimulationReport, path: str | Path) -> None:
    """Stable column order, full-precision floats, one row per record."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for row in report.rows:
            writer.writerow(
                [
                    row.policy,
                    row.teaching_length,
                    repr(row.learner_alpha),
                    repr(row.teacher_alpha),
                    row.n_learners,
                    repr(row.mean_test_error),
                    repr(row.std_test_error),
                    row.seed,
                ]
            )


def read_report_csv(path: str | Path) -> SimulationReport:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for record in csv.DictReader(fh):
            rows.append(
                SimulationRow(
                    policy=record["policy"],
                    teaching_length=int(record["teaching_length"]),
                    learner_alpha=float(record["learner_alpha"]),
                    teacher_alpha=float(record["teacher_alpha"]),
                    n_learners=int(record["n_learners"]),
                    mean_test_error=float(record["mean_test_error"]),
                    std_test_error=float(record["std_test_error"]),
                    seed=int(record["seed"]),
                )
            )
    return SimulationReport(rows=rows)


def write_difficulty_csv(values: Sequence[float], path: str | Path) -> None:
    """Two columns: step index (1-based) and difficulty."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "difficulty"])
        for step, value in enumerate(values, start=1):
            writer.writerow([step, repr(float(value))])
