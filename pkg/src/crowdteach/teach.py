"""Teaching policies: noise-tolerant greedy, noise-free set cover, random.

The greedy policy maximizes the monotone submodular surrogate

    F(A) = sum_h (Q(h) - Q(h|A)) * err(h, target)

where Q(h|A) is the unnormalized posterior, and stops once
F(A) >= E - P0(target) * epsilon with E the prior expected error.  Reaching
that level certifies expected posterior error <= epsilon.  In the infinite-
confidence limit the surrogate degenerates to weighted set coverage, which
is exactly the classical noise-free teacher implemented by the set-cover
baseline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .core import (
    TeachingProblem,
    UsageError,
    sequence_diagnostics,
)
from .seeding import SeedLike, as_generator

STATUS_TOLERANCE_MET = "tolerance_met"
STATUS_EXHAUSTED = "exhausted"
STATUS_UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class TeachConfig:
    """Greedy-teacher knobs: target error, length cap, assumed confidence.

    teacher_alpha is the confidence scale the teacher plans with; it may
    deliberately mismatch the learners' true scale.
    """

    epsilon: float
    max_len: Optional[int] = None
    teacher_alpha: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise UsageError("epsilon must lie in (0, 1)")
        if self.max_len is not None and self.max_len < 1:
            raise UsageError("max_len must be >= 1")


@dataclass
class TeachingSequence:
    """Ordered distinct example ids with per-step diagnostics."""

    example_ids: list[str]
    per_step: list[dict[str, float]]
    status: str
    policy: str = ""

    def __len__(self) -> int:
        return len(self.example_ids)


def _teacher_view(problem: TeachingProblem, teacher_alpha: Optional[float]) -> TeachingProblem:
    if teacher_alpha is None or teacher_alpha == problem.alpha:
        return problem
    return problem.with_alpha(teacher_alpha)


def surrogate_F(problem: TeachingProblem, A: Iterable[str]) -> float:
    """Error-weighted drop of unnormalized posterior mass after showing A.

    Accumulated in the log domain and exponentiated once, so huge alphas
    simply drive the surviving mass of hit hypotheses to zero.
    """
    ids = list(A)
    if len(set(ids)) != len(ids):
        raise UsageError("A must contain distinct example ids")
    cols = [problem.example_index(i) for i in ids]
    with np.errstate(divide="ignore"):
        log_prior = np.log(problem.prior)
    log_q = log_prior + problem.log_penalties[:, cols].sum(axis=1)
    return float(problem.errors @ (problem.prior - np.exp(log_q)))


def _greedy_gain_argmax(
    log_q: np.ndarray, problem: TeachingProblem, candidates: np.ndarray
) -> tuple[int, float]:
    """Candidate maximizing F(A + x), ties resolved to the lowest example index.

    Gains are reduced with add.reduce so that candidates hitting identical
    hypothesis sets come out bit-equal; BLAS products round per column and
    would break ties nondeterministically.
    """
    q = np.exp(log_q)
    # gain(x) = sum over h inconsistent with x of err(h) * Q(h|A) * (1 - lik)
    drop = q[:, None] * (1.0 - np.exp(problem.log_penalties[:, candidates]))
    gains = np.add.reduce(problem.errors[:, None] * drop, axis=0)
    best = int(np.argmax(gains))  # first max = lowest index, candidates are sorted
    return int(candidates[best]), float(gains[best])


def strict_teach(problem: TeachingProblem, config: TeachConfig) -> TeachingSequence:
    """Greedy surrogate maximization with the natural stopping rule.

    Each step adds the example with the largest surrogate gain (ties to the
    lowest index).  Terminates with status:

    - tolerance_met: F reached E - P0(target) * epsilon, certifying the
      posterior expected error is within epsilon;
    - exhausted: the length cap was hit first;
    - unreachable: no remaining example has positive gain (or the pool ran
      out) while the threshold is still unmet.
    """
    view = _teacher_view(problem, config.teacher_alpha)
    prior = view.prior
    errors = view.errors
    budget = view.prior_expected_error()
    threshold = budget - float(prior[view.target_index]) * config.epsilon

    n = len(view.teaching_set)
    chosen: list[int] = []
    remaining = np.arange(n)
    with np.errstate(divide="ignore"):
        log_q = np.log(prior)
    f_value = 0.0
    status = STATUS_UNREACHABLE
    while True:
        if f_value >= threshold:
            status = STATUS_TOLERANCE_MET
            break
        if config.max_len is not None and len(chosen) >= config.max_len:
            status = STATUS_EXHAUSTED
            break
        if remaining.size == 0:
            status = STATUS_UNREACHABLE
            break
        pick, gain = _greedy_gain_argmax(log_q, view, remaining)
        if gain <= 0.0:
            status = STATUS_UNREACHABLE
            break
        chosen.append(pick)
        remaining = remaining[remaining != pick]
        log_q = log_q + view.log_penalties[:, pick]
        f_value = float(errors @ (prior - np.exp(log_q)))

    ids = [view.teaching_set[i].id for i in chosen]
    return TeachingSequence(
        example_ids=ids,
        per_step=sequence_diagnostics(view, ids),
        status=status,
        policy="strict",
    )


def setcover_teach(
    problem: TeachingProblem, max_len: int, rng: SeedLike = None
) -> TeachingSequence:
    """Noise-free greedy teacher: eliminate inconsistent hypothesis mass.

    A hypothesis is eliminated outright by its first inconsistent example.
    Each step picks the example killing the most err-weighted prior mass
    among survivors (the infinite-confidence limit of the greedy surrogate,
    so the two policies agree pick-for-pick while elimination is possible).
    Once nothing is left to eliminate, remaining picks are uniform random
    without replacement.
    """
    if max_len < 1:
        raise UsageError("max_len must be >= 1")
    gen = as_generator(rng)
    n = len(problem.teaching_set)
    weights = problem.prior * problem.errors
    alive = np.ones(problem.n_hypotheses, dtype=bool)
    chosen: list[int] = []
    remaining = list(range(n))
    while len(chosen) < min(max_len, n):
        masses = np.array(
            [weights[alive & problem.inconsistent[:, j]].sum() for j in remaining]
        )
        if masses.size and masses.max() > 0.0:
            pick = remaining[int(np.argmax(masses))]
        else:
            pick = remaining[int(gen.integers(len(remaining)))]
        chosen.append(pick)
        remaining.remove(pick)
        alive &= ~problem.inconsistent[:, pick]

    ids = [problem.teaching_set[i].id for i in chosen]
    return TeachingSequence(
        example_ids=ids,
        per_step=sequence_diagnostics(problem, ids),
        status=STATUS_EXHAUSTED,
        policy="setcover",
    )


def random_teach(
    problem: TeachingProblem, max_len: int, rng: SeedLike = None
) -> TeachingSequence:
    """Uniform sample of max_len distinct examples."""
    n = len(problem.teaching_set)
    if not 1 <= max_len <= n:
        raise UsageError(f"max_len must be in [1, {n}]")
    gen = as_generator(rng)
    picks = gen.choice(n, size=max_len, replace=False)
    ids = [problem.teaching_set[int(i)].id for i in picks]
    return TeachingSequence(
        example_ids=ids,
        per_step=sequence_diagnostics(problem, ids),
        status=STATUS_EXHAUSTED,
        policy="random",
    )


@dataclass(frozen=True)
class ErrorCertificate:
    """Bracket on the posterior expected error implied by the surrogate level."""

    lower: float
    upper: float


def error_certificate(problem: TeachingProblem, A: Iterable[str]) -> ErrorCertificate:
    """Bounds E - F(A) <= expected posterior error <= (E - F(A)) / P0(target)."""
    budget = problem.prior_expected_error()
    f_value = surrogate_F(problem, A)
    p0_target = float(problem.prior[problem.target_index])
    return ErrorCertificate(
        lower=max(0.0, budget - f_value),
        upper=(budget - f_value) / p0_target,
    )


# -- sequence file format ---------------------------------------------------
# {"policy": str, "status": str, "example_ids": [str], "per_step": [{"F","gain","difficulty"}]}


def save_sequence(sequence: TeachingSequence, path: str | Path) -> None:
    payload = {
        "policy": sequence.policy,
        "status": sequence.status,
        "example_ids": list(sequence.example_ids),
        "per_step": [
            {
                "F": step["F_value"],
                "gain": step["marginal_gain"],
                "difficulty": step["difficulty"],
            }
            for step in sequence.per_step
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_sequence(path: str | Path) -> TeachingSequence:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed sequence file: {exc}") from exc
    try:
        return TeachingSequence(
            example_ids=list(payload["example_ids"]),
            per_step=[
                {
                    "F_value": float(s["F"]),
                    "marginal_gain": float(s["gain"]),
                    "difficulty": float(s["difficulty"]),
                }
                for s in payload.get("per_step", [])
            ],
            status=str(payload.get("status", "")),
            policy=str(payload.get("policy", "")),
        )
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path}: sequence file missing field {exc}") from exc
