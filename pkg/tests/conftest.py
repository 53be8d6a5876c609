"""Shared instances for the test suite.

`two_hypothesis_problem` is the hand-checkable reference: two hypotheses
with equal prior, one example that contradicts the second hypothesis with
likelihood exactly 0.2, giving the unnormalized posterior (0.5, 0.1) and
the normalized posterior (5/6, 1/6).
"""

from __future__ import annotations

import numpy as np
import pytest

from crowdteach.core import Example, Hypothesis, HypothesisClass, TeachingProblem


def make_two_hypothesis_problem(alpha: float = 1.0) -> TeachingProblem:
    # margin ln(4) against h1 makes its likelihood on e0 exactly 0.2 at alpha=1
    m = np.log(4.0) / alpha
    target = Hypothesis(weights=np.array([1.0, 0.0]))
    h1 = Hypothesis(weights=np.array([-m, 0.0]))
    examples = [
        Example(id="e0", features=np.array([1.0, 0.0]), label=1),   # h1 inconsistent
        Example(id="e1", features=np.array([0.0, 1.0]), label=1),   # both consistent
    ]
    klass = HypothesisClass(
        hypotheses=[target, h1], prior=np.array([0.5, 0.5]), target_index=0
    )
    return TeachingProblem(teaching_set=examples, hypothesis_class=klass, alpha=alpha)


@pytest.fixture
def two_hypothesis_problem() -> TeachingProblem:
    return make_two_hypothesis_problem()


def make_random_instance(
    rng: np.random.Generator,
    n_hypotheses: int = 8,
    n_examples: int = 10,
    dim: int = 2,
    alpha: float = 2.0,
    uniform_prior: bool = False,
    min_margin: float = 0.05,
    test_examples: int = 0,
) -> TeachingProblem:
    """Random realizable instance: labels come from a randomly chosen target.

    Examples are rejection-sampled so every |h(x)| clears min_margin, which
    keeps sign patterns stable under perturbation and avoids boundary ties.
    """
    hypotheses = []
    for _ in range(n_hypotheses):
        w = rng.normal(size=dim)
        w /= np.linalg.norm(w)
        hypotheses.append(Hypothesis(weights=w, offset=float(rng.normal(scale=0.2))))

    def sample_points(count):
        points = []
        while len(points) < count:
            x = rng.normal(size=dim) * 1.5
            margins = [abs(float(h.weights @ x + h.offset)) for h in hypotheses]
            if min(margins) >= min_margin:
                points.append(x)
        return points

    target_index = int(rng.integers(n_hypotheses))
    target = hypotheses[target_index]

    def label(x):
        return 1 if float(target.weights @ x + target.offset) >= 0 else -1

    train_points = sample_points(n_examples)
    examples = [
        Example(id=f"x{i}", features=p, label=label(p)) for i, p in enumerate(train_points)
    ]
    if uniform_prior:
        prior = np.full(n_hypotheses, 1.0 / n_hypotheses)
    else:
        prior = rng.uniform(0.2, 1.0, size=n_hypotheses)
        prior /= prior.sum()
    klass = HypothesisClass(hypotheses=hypotheses, prior=prior, target_index=target_index)
    test = None
    if test_examples:
        test = [
            Example(id=f"t{i}", features=p, label=label(p))
            for i, p in enumerate(sample_points(test_examples))
        ]
    return TeachingProblem(
        teaching_set=examples, hypothesis_class=klass, alpha=alpha, test_set=test
    )


def make_spoke_instance(
    per_sector: int = 45, alpha: float = 2.0, seed: int = 5
) -> TeachingProblem:
    """Rich 2-D instance: 8 concurrent separators through the origin.

    The lines partition the plane into 16 angular sectors, each realized by
    per_sector points, so every cell of the decomposition holds per_sector
    examples and neighboring sectors differ in exactly one hypothesis.
    """
    rng = np.random.default_rng(seed)
    angles = [np.pi * k / 8 for k in range(8)]
    hypotheses = [
        Hypothesis(weights=np.array([np.cos(a), np.sin(a)]), offset=0.0) for a in angles
    ]
    target_index = 0
    # sector boundaries are the separator normals' zero lines
    boundary = sorted(
        [(a + np.pi / 2) % (2 * np.pi) for a in angles]
        + [(a + 3 * np.pi / 2) % (2 * np.pi) for a in angles]
    )
    examples = []
    for s in range(16):
        low, high = boundary[s], boundary[(s + 1) % 16]
        if high < low:
            high += 2 * np.pi
        span = high - low
        for j in range(per_sector):
            theta = low + span * (0.15 + 0.7 * rng.random())
            radius = 0.5 + rng.random()
            x = np.array([radius * np.cos(theta), radius * np.sin(theta)])
            y = 1 if float(hypotheses[target_index].weights @ x) >= 0 else -1
            examples.append(Example(id=f"s{s}-{j}", features=x, label=y))
    klass = HypothesisClass(
        hypotheses=hypotheses, prior=np.full(8, 1 / 8), target_index=target_index
    )
    return TeachingProblem(teaching_set=examples, hypothesis_class=klass, alpha=alpha)
