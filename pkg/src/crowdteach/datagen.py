"""Synthetic two-Gaussian classification problems and problem-file I/O.

The generated task mirrors the insect-labeling setup used for controlled
experiments: 2-D features drawn from one Gaussian per class, a hypothesis
class of near-origin linear separators grouped into eight angular clusters,
a target chosen as the minimum-error hypothesis on the pool, and a pruning
pass that removes any example the target mislabels so the problem becomes
realizable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Example, Hypothesis, HypothesisClass, TeachingProblem, UsageError, predict
from .seeding import SeedLike, as_generator


@dataclass(frozen=True)
class VwParams:
    """Feature-cloud parameters; covariances are per-axis variances."""

    mean_pos: tuple[float, float] = (0.10, 0.13)
    mean_neg: tuple[float, float] = (-0.10, -0.13)
    cov_diag: tuple[float, float] = (0.12, 0.12)
    n_train_per_class: int = 80
    n_test_per_class: int = 20

    def __post_init__(self):
        if self.cov_diag[0] <= 0 or self.cov_diag[1] <= 0:
            raise UsageError("cov_diag entries must be positive")
        if self.n_train_per_class < 1 or self.n_test_per_class < 1:
            raise UsageError("per-class counts must be >= 1")


@dataclass(frozen=True)
class VwHypothesisParams:
    """Angular hypothesis clusters: cluster i is centered at angle pi/4 * i.

    Each draw samples (angle, offset) from a Gaussian with the given
    per-component variances and maps it to the separator
    weights = [cos(angle), sin(angle)], offset = offset, i.e. a line through
    near-origin at that orientation.
    """

    n_clusters: int = 8
    per_cluster: int = 2
    angle_step: float = math.pi / 4
    param_cov: tuple[float, float] = (2.0, 0.005)

    def __post_init__(self):
        if self.per_cluster < 1:
            raise UsageError("per_cluster must be >= 1")
        if self.param_cov[0] < 0 or self.param_cov[1] < 0:
            raise UsageError("param_cov entries must be nonnegative")


def _sample_class(gen, mean, cov_diag, n, label, prefix) -> list[Example]:
    std = np.sqrt(np.asarray(cov_diag, dtype=float))
    points = gen.normal(loc=np.asarray(mean, dtype=float), scale=std, size=(n, 2))
    return [Example(id=f"{prefix}-{i:03d}", features=points[i], label=label) for i in range(n)]


def generate_vw(params: VwParams, seed: SeedLike = None) -> dict[str, list[Example]]:
    """Draw labeled train/test pools; class +1 from mean_pos, -1 from mean_neg."""
    gen = as_generator(seed)
    train = _sample_class(
        gen, params.mean_pos, params.cov_diag, params.n_train_per_class, 1, "train-pos"
    ) + _sample_class(
        gen, params.mean_neg, params.cov_diag, params.n_train_per_class, -1, "train-neg"
    )
    test = _sample_class(
        gen, params.mean_pos, params.cov_diag, params.n_test_per_class, 1, "test-pos"
    ) + _sample_class(
        gen, params.mean_neg, params.cov_diag, params.n_test_per_class, -1, "test-neg"
    )
    return {"train": train, "test": test}


def generate_vw_hypotheses(
    params: VwHypothesisParams, seed: SeedLike = None
) -> list[Hypothesis]:
    """Sample per_cluster separators around each of the angular cluster centers."""
    gen = as_generator(seed)
    std_angle, std_offset = math.sqrt(params.param_cov[0]), math.sqrt(params.param_cov[1])
    hypotheses = []
    for i in range(params.n_clusters):
        for _ in range(params.per_cluster):
            angle = gen.normal(params.angle_step * i, std_angle)
            offset = gen.normal(0.0, std_offset)
            hypotheses.append(
                Hypothesis(weights=np.array([math.cos(angle), math.sin(angle)]), offset=offset)
            )
    return hypotheses


def select_target(hypotheses: list[Hypothesis], examples: list[Example]) -> int:
    """Index of the hypothesis with minimal label disagreement (ties: lowest)."""
    if not hypotheses or not examples:
        raise UsageError("need at least one hypothesis and one example")
    disagreements = [
        sum(predict(h, x) != x.label for x in examples) for h in hypotheses
    ]
    return int(np.argmin(disagreements))


def enforce_realizability(
    examples: list[Example], hypotheses: list[Hypothesis], target_index: int
) -> list[Example]:
    """Drop exactly the examples the target mislabels, preserving order."""
    target = hypotheses[target_index]
    kept = [x for x in examples if predict(target, x) == x.label]
    if not kept:
        raise UsageError("target hypothesis mislabels every example (degenerate target)")
    return kept


def make_vw_problem(
    alpha: float = 2.0,
    data_params: VwParams = VwParams(),
    hypothesis_params: VwHypothesisParams = VwHypothesisParams(),
    seed: int = 0,
) -> TeachingProblem:
    """Full pipeline: sample data and hypotheses, pick the target, prune, wrap.

    The prior is uniform.  Data and hypothesis draws use independent streams
    derived from the seed, so either half is stable when the other's
    parameters change.
    """
    seq = np.random.SeedSequence(seed)
    data_seed, hyp_seed = seq.spawn(2)
    pools = generate_vw(data_params, np.random.default_rng(data_seed))
    hypotheses = generate_vw_hypotheses(hypothesis_params, np.random.default_rng(hyp_seed))
    target_index = select_target(hypotheses, pools["train"])
    train = enforce_realizability(pools["train"], hypotheses, target_index)
    n = len(hypotheses)
    klass = HypothesisClass(
        hypotheses=hypotheses, prior=np.full(n, 1.0 / n), target_index=target_index
    )
    return TeachingProblem(
        teaching_set=train, hypothesis_class=klass, alpha=alpha, test_set=pools["test"]
    )


# -- problem file format ------------------------------------------------------
# JSON object: alpha (number), examples [{id, x, y, asset?}], hypotheses
# [{w, b}], prior (numbers), target_index (int), test_examples? (same shape
# as examples).  Unknown fields are ignored for forward compatibility.


class ProblemFormatError(UsageError):
    """A problem file failed to parse or validate."""


def _example_to_json(x: Example) -> dict:
    entry = {"id": x.id, "x": [float(v) for v in x.features], "y": x.label}
    if x.asset is not None:
        entry["asset"] = x.asset
    return entry


def save_problem(problem: TeachingProblem, path: str | Path) -> None:
    payload = {
        "alpha": problem.alpha,
        "examples": [_example_to_json(x) for x in problem.teaching_set],
        "hypotheses": [
            {"w": [float(v) for v in h.weights], "b": h.offset}
            for h in problem.hypothesis_class.hypotheses
        ],
        "prior": [float(p) for p in problem.prior],
        "target_index": problem.target_index,
    }
    if problem.test_set is not None:
        payload["test_examples"] = [_example_to_json(x) for x in problem.test_set]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _parse_example(entry: dict, where: str) -> Example:
    try:
        return Example(
            id=str(entry["id"]),
            features=np.asarray(entry["x"], dtype=float),
            label=int(entry["y"]),
            asset=entry.get("asset"),
        )
    except KeyError as exc:
        raise ProblemFormatError(f"{where}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"{where}: {exc}") from exc


def load_problem(path: str | Path) -> TeachingProblem:
    """Parse and validate a problem file; round trips save_problem exactly."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(payload, dict):
        raise ProblemFormatError(f"{path}: top level must be an object")
    for fieldname in ("alpha", "examples", "hypotheses", "prior", "target_index"):
        if fieldname not in payload:
            raise ProblemFormatError(f"{path}: missing required field {fieldname!r}")
    examples = [
        _parse_example(e, f"{path}: examples[{i}]") for i, e in enumerate(payload["examples"])
    ]
    test = None
    if payload.get("test_examples") is not None:
        test = [
            _parse_example(e, f"{path}: test_examples[{i}]")
            for i, e in enumerate(payload["test_examples"])
        ]
    try:
        hypotheses = [
            Hypothesis(weights=np.asarray(h["w"], dtype=float), offset=float(h["b"]))
            for h in payload["hypotheses"]
        ]
        klass = HypothesisClass(
            hypotheses=hypotheses,
            prior=np.asarray(payload["prior"], dtype=float),
            target_index=int(payload["target_index"]),
        )
        return TeachingProblem(
            teaching_set=examples,
            hypothesis_class=klass,
            alpha=float(payload["alpha"]),
            test_set=test,
        )
    except ProblemFormatError:
        raise
    except (KeyError, TypeError) as exc:
        raise ProblemFormatError(f"{path}: {exc}") from exc
    except UsageError as exc:
        raise ProblemFormatError(f"{path}: validation failed: {exc}") from exc
