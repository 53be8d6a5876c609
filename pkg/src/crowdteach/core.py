"""Domain types and elementary quantities for noise-tolerant teaching.

A teaching problem is a pool of labeled examples, a finite class of linear
scoring hypotheses with a prior, and a designated target hypothesis that is
consistent with every teaching label (realizability).  The learner's belief
is tracked as an unnormalized posterior: the prior times, for every shown
example inconsistent with a hypothesis, a logistic likelihood factor.
Weights are stored in the log domain so that confidence scales up to 1e6
(the effectively noise-free limit) do not underflow the normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy import special

PROB_ATOL = 1e-12


class UsageError(ValueError):
    """A caller violated an operation's precondition."""


@dataclass
class Example:
    """A teachable item: feature vector, ground-truth label, optional display asset."""

    id: str
    features: np.ndarray
    label: int
    asset: Optional[str] = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        if self.features.ndim != 1:
            raise UsageError(f"example {self.id!r}: features must be a 1-D vector")
        if not np.all(np.isfinite(self.features)):
            raise UsageError(f"example {self.id!r}: features must be finite")
        if self.label not in (-1, 1):
            raise UsageError(f"example {self.id!r}: label must be -1 or +1, got {self.label!r}")
        self.label = int(self.label)


@dataclass
class Hypothesis:
    """A linear scoring function w.x + b; sign is the label, magnitude the confidence."""

    weights: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1:
            raise UsageError("hypothesis weights must be a 1-D vector")
        if not (np.all(np.isfinite(self.weights)) and np.isfinite(self.offset)):
            raise UsageError("hypothesis parameters must be finite")
        self.offset = float(self.offset)

    def score(self, x: Example) -> float:
        if self.weights.shape != x.features.shape:
            raise UsageError(
                f"dimension mismatch: hypothesis has d={self.weights.size}, "
                f"example {x.id!r} has d={x.features.size}"
            )
        return float(self.weights @ x.features + self.offset)


@dataclass
class HypothesisClass:
    """An ordered finite hypothesis list with a prior and a target index."""

    hypotheses: list[Hypothesis]
    prior: np.ndarray
    target_index: int

    def __post_init__(self):
        if not self.hypotheses:
            raise UsageError("hypothesis class must be nonempty")
        self.prior = np.asarray(self.prior, dtype=float)
        if self.prior.shape != (len(self.hypotheses),):
            raise UsageError("prior length must match the number of hypotheses")
        if np.any(self.prior < 0) or not np.all(np.isfinite(self.prior)):
            raise UsageError("prior entries must be finite and nonnegative")
        if abs(float(self.prior.sum()) - 1.0) > PROB_ATOL:
            raise UsageError(f"prior must sum to 1 (got {self.prior.sum()!r})")
        if not 0 <= self.target_index < len(self.hypotheses):
            raise UsageError("target_index out of range")
        if self.prior[self.target_index] <= 0:
            raise UsageError("prior mass of the target hypothesis must be positive")
        self.target_index = int(self.target_index)

    def __len__(self) -> int:
        return len(self.hypotheses)

    @property
    def target(self) -> Hypothesis:
        return self.hypotheses[self.target_index]


@dataclass
class TeachingProblem:
    """Teaching pool + hypothesis class + learner-confidence scale alpha.

    Realizability is enforced at construction: the target hypothesis must
    predict every teaching label.  Derived per-(hypothesis, example) matrices
    (margins, predicted signs, likelihoods at the true labels) are computed
    lazily and cached; all public operations are pure.
    """

    teaching_set: list[Example]
    hypothesis_class: HypothesisClass
    alpha: float
    test_set: Optional[list[Example]] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.teaching_set:
            raise UsageError("teaching set must be nonempty")
        if self.alpha <= 0 or not np.isfinite(self.alpha):
            raise UsageError("alpha must be a positive finite real")
        self.alpha = float(self.alpha)
        d = self.teaching_set[0].features.size
        for x in self.teaching_set + (self.test_set or []):
            if x.features.size != d:
                raise UsageError(f"example {x.id!r} has dimension {x.features.size}, expected {d}")
        for h in self.hypothesis_class.hypotheses:
            if h.weights.size != d:
                raise UsageError("hypothesis dimension does not match the examples")
        ids = [x.id for x in self.teaching_set]
        if len(set(ids)) != len(ids):
            raise UsageError("teaching-set example ids must be unique")
        target = self.hypothesis_class.target
        for x in self.teaching_set:
            if predict(target, x) != x.label:
                raise UsageError(
                    f"problem is not realizable: target mislabels example {x.id!r}"
                )

    # -- cached derived matrices ------------------------------------------

    def _derived(self, key: str):
        if key not in self._cache:
            self._cache.update(self._compute_derived())
        return self._cache[key]

    def _compute_derived(self) -> dict:
        W = np.stack([h.weights for h in self.hypothesis_class.hypotheses])
        b = np.array([h.offset for h in self.hypothesis_class.hypotheses])
        X = np.stack([x.features for x in self.teaching_set])
        y = np.array([x.label for x in self.teaching_set])
        margins = W @ X.T + b[:, None]  # (|H|, |X|)
        signs = np.where(margins >= 0, 1, -1)
        inconsistent = signs != y[None, :]
        # log P(y|h,x) = -log(1 + exp(-alpha * h(x) * y)); stable at alpha=1e6
        loglik = -np.logaddexp(0.0, -self.alpha * margins * y[None, :])
        errors = (signs != signs[self.hypothesis_class.target_index][None, :]).mean(axis=1)
        return {
            "margins": margins,
            "signs": signs,
            "labels": y,
            "inconsistent": inconsistent,
            "loglik_if_inconsistent": np.where(inconsistent, loglik, 0.0),
            "errors": errors,
            "index_of": {x.id: i for i, x in enumerate(self.teaching_set)},
        }

    @property
    def signs(self) -> np.ndarray:
        """Predicted labels, shape (|H|, |X|), entries in {-1, +1}."""
        return self._derived("signs")

    @property
    def labels(self) -> np.ndarray:
        return self._derived("labels")

    @property
    def inconsistent(self) -> np.ndarray:
        """Boolean (|H|, |X|): hypothesis disagrees with the true label."""
        return self._derived("inconsistent")

    @property
    def log_penalties(self) -> np.ndarray:
        """log-likelihood update applied to inconsistent pairs, 0 elsewhere."""
        return self._derived("loglik_if_inconsistent")

    @property
    def errors(self) -> np.ndarray:
        """err(h, target) for every h: teaching-set disagreement fraction."""
        return self._derived("errors")

    def example_index(self, example_id: str) -> int:
        idx = self._derived("index_of").get(example_id)
        if idx is None:
            raise UsageError(f"example id {example_id!r} is not in the teaching set")
        return idx

    def with_alpha(self, alpha: float) -> "TeachingProblem":
        """A view of the same problem under a different confidence scale."""
        return replace(self, alpha=float(alpha), _cache={})

    @property
    def prior(self) -> np.ndarray:
        return self.hypothesis_class.prior

    @property
    def target_index(self) -> int:
        return self.hypothesis_class.target_index

    @property
    def n_hypotheses(self) -> int:
        return len(self.hypothesis_class)

    def prior_expected_error(self) -> float:
        """Expected disagreement rate before any teaching (the greedy budget)."""
        return float(self.prior @ self.errors)


@dataclass(frozen=True, eq=False)
class PosteriorTracker:
    """Log-domain unnormalized posterior over the hypothesis class.

    The target's log weight never moves: under realizability no shown
    example is inconsistent with it, so its weight stays at the prior.
    """

    log_weights: np.ndarray
    shown: frozenset[str] = frozenset()

    def __eq__(self, other) -> bool:
        if not isinstance(other, PosteriorTracker):
            return NotImplemented
        return self.shown == other.shown and np.array_equal(
            self.log_weights, other.log_weights
        )


def new_tracker(problem: TeachingProblem) -> PosteriorTracker:
    with np.errstate(divide="ignore"):
        return PosteriorTracker(log_weights=np.log(problem.prior))


def predict(h: Hypothesis, x: Example) -> int:
    """Label assigned by h to x; the boundary resolves to +1 (sgn(0) := +1)."""
    return 1 if h.score(x) >= 0 else -1


def likelihood(h: Hypothesis, x: Example, y: int, alpha: float) -> float:
    """Logistic confidence 1 / (1 + exp(-alpha * h(x) * y)).

    Strictly inside (0, 1) mathematically; saturates to 0.0/1.0 in float64
    once |alpha * h(x)| exceeds ~745 (use the log-domain tracker there).
    """
    if alpha <= 0:
        raise UsageError("alpha must be positive")
    return float(np.exp(log_likelihood(h, x, y, alpha)))


def log_likelihood(h: Hypothesis, x: Example, y: int, alpha: float) -> float:
    return float(-np.logaddexp(0.0, -alpha * h.score(x) * y))


def error_rate(h: Hypothesis, problem: TeachingProblem) -> float:
    """Fraction of the teaching set on which h and the target disagree."""
    target = problem.hypothesis_class.target
    disagree = sum(predict(h, x) != predict(target, x) for x in problem.teaching_set)
    return disagree / len(problem.teaching_set)


def update_tracker(
    tracker: PosteriorTracker, problem: TeachingProblem, example_id: str
) -> PosteriorTracker:
    """Fold one shown example into the unnormalized posterior.

    Hypotheses that disagree with the example's label are down-weighted by
    their likelihood; consistent hypotheses are untouched.  Sequences contain
    distinct examples, so re-showing is a usage error.
    """
    if example_id in tracker.shown:
        raise UsageError(f"example {example_id!r} was already shown")
    idx = problem.example_index(example_id)
    log_weights = tracker.log_weights + problem.log_penalties[:, idx]
    return PosteriorTracker(log_weights=log_weights, shown=tracker.shown | {example_id})


def normalized_posterior(tracker: PosteriorTracker) -> np.ndarray:
    """exp(log weights) / Z, computed with a max shift for extreme alphas."""
    shift = tracker.log_weights.max()
    w = np.exp(tracker.log_weights - shift)
    return w / w.sum()


def expected_error(tracker: PosteriorTracker, problem: TeachingProblem) -> float:
    """Posterior-weighted mean disagreement rate with the target."""
    return float(normalized_posterior(tracker) @ problem.errors)


def binary_entropy(p) -> np.ndarray | float:
    """Base-2 entropy of a Bernoulli(p); vectorizes over arrays."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(p * np.log2(p) + (1 - p) * np.log2(1 - p))
    h = np.where((p <= 0) | (p >= 1), 0.0, h)
    return float(h) if h.ndim == 0 else h


def difficulty(tracker: PosteriorTracker, problem: TeachingProblem, x: Example) -> float:
    """Uncertainty a learner would face answering x, in bits.

    A learner holding h answers +1 with probability sigma(alpha * h(x)); the
    difficulty is the entropy of that response averaged over the posterior.
    Prototypical examples every plausible hypothesis scores with a large
    margin come out near 0, boundary examples near 1.
    """
    posterior = normalized_posterior(tracker)
    scores = np.array([h.score(x) for h in problem.hypothesis_class.hypotheses])
    response = special.expit(problem.alpha * scores)
    return float(posterior @ binary_entropy(response))


def sequence_diagnostics(
    problem: TeachingProblem, example_ids: Sequence[str]
) -> list[dict[str, float]]:
    """Per-step F value, marginal gain, pre-update difficulty, and error bound.

    Shared by every policy so that recorded diagnostics always mean the same
    thing: difficulty is evaluated at the tracker state just before the pick.
    """
    prior = problem.prior
    errors = problem.errors
    budget = problem.prior_expected_error()
    p0_target = float(prior[problem.target_index])
    tracker = new_tracker(problem)
    rows = []
    f_prev = 0.0
    for example_id in example_ids:
        idx = problem.example_index(example_id)
        diff = difficulty(tracker, problem, problem.teaching_set[idx])
        tracker = update_tracker(tracker, problem, example_id)
        f_value = float(errors @ (prior - np.exp(tracker.log_weights)))
        rows.append(
            {
                "F_value": f_value,
                "marginal_gain": f_value - f_prev,
                "difficulty": diff,
                "expected_error_upper_bound": (budget - f_value) / p0_target,
            }
        )
        f_prev = f_value
    return rows
