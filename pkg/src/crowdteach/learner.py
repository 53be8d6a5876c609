"""Stochastic learner simulation.

The learner performs a random walk over the hypothesis class: she keeps her
current hypothesis while shown examples agree with it.  On a disagreement
the observation may dislodge her: the current hypothesis survives with
probability equal to its likelihood on the example, otherwise she redraws
from the full normalized posterior (the same index included).  With this
survival rule the marginal distribution of the current hypothesis after t
examples is exactly the tracked posterior P_t, which is what the population
experiments and their statistical checks rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    Example,
    PosteriorTracker,
    TeachingProblem,
    UsageError,
    new_tracker,
    normalized_posterior,
    predict,
    update_tracker,
)
from .seeding import SeedLike, as_generator


@dataclass(frozen=True)
class LearnerState:
    current_index: int
    tracker: PosteriorTracker
    step: int
    last_resample: bool = False


@dataclass(frozen=True)
class RolloutTrace:
    """One learner's path: hypothesis indices h_1..h_{T+1} and resample steps."""

    hypothesis_path: tuple[int, ...]
    switch_steps: tuple[int, ...]
    final_test_error: Optional[float]


def init_learner(problem: TeachingProblem, rng: SeedLike) -> LearnerState:
    """Draw the initial hypothesis from the prior; deterministic per seed."""
    gen = as_generator(rng)
    index = int(gen.choice(problem.n_hypotheses, p=problem.prior))
    return LearnerState(current_index=index, tracker=new_tracker(problem), step=0)


def learner_observe(
    state: LearnerState, problem: TeachingProblem, example_id: str, rng: SeedLike
) -> LearnerState:
    """Show one labeled example and return the learner's next state.

    The belief tracker always folds the example in.  The hypothesis moves
    only if it disagreed with the label and failed its survival draw, in
    which case the new index is sampled from the updated posterior.
    """
    gen = as_generator(rng)
    idx = problem.example_index(example_id)
    tracker = update_tracker(state.tracker, problem, example_id)
    current = state.current_index
    resampled = False
    if problem.inconsistent[current, idx]:
        survive = np.exp(problem.log_penalties[current, idx])
        if gen.random() >= survive:
            current = int(gen.choice(problem.n_hypotheses, p=normalized_posterior(tracker)))
            resampled = True
    return LearnerState(
        current_index=current, tracker=tracker, step=state.step + 1, last_resample=resampled
    )


def learner_predict(state: LearnerState, problem: TeachingProblem, x: Example) -> int:
    """Label the learner would give for x under her current hypothesis."""
    return predict(problem.hypothesis_class.hypotheses[state.current_index], x)


def hypothesis_test_error(problem: TeachingProblem, index: int) -> float:
    """Disagreement rate of hypothesis `index` with the test-set labels."""
    if not problem.test_set:
        raise UsageError("problem has no test set")
    h = problem.hypothesis_class.hypotheses[index]
    wrong = sum(predict(h, x) != x.label for x in problem.test_set)
    return wrong / len(problem.test_set)


def rollout(
    problem: TeachingProblem, sequence: Sequence[str], rng: SeedLike
) -> RolloutTrace:
    """Run one learner through a teaching sequence, then freeze for testing.

    No feedback is given during the test phase, so the final hypothesis is
    simply scored against the test labels.
    """
    gen = as_generator(rng)
    state = init_learner(problem, gen)
    path = [state.current_index]
    switches = []
    for step, example_id in enumerate(sequence, start=1):
        state = learner_observe(state, problem, example_id, gen)
        path.append(state.current_index)
        if state.last_resample:
            switches.append(step)
    test_error = (
        hypothesis_test_error(problem, state.current_index) if problem.test_set else None
    )
    return RolloutTrace(
        hypothesis_path=tuple(path),
        switch_steps=tuple(switches),
        final_test_error=test_error,
    )
