"""Relaxed-greedy teaching over sign-signature cells of a linear class.

The hypothesis class partitions the teaching pool into cells: maximal groups
of examples labeled identically by every hypothesis.  Two cells are
neighbors when their signatures differ in exactly one hypothesis (the shared
separating face).  The policy keeps a conservative belief over hypotheses,
multiplying inconsistent ones by a fixed weight w_o and renormalizing, and
at each step either shows an example from one of a "bipolar" neighboring
cell pair (belief-weighted vote positive on one side, negative on the
other), or from the cell whose weighted vote is closest to zero.  The
belief odds against the target decay geometrically under this rule.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import TeachingProblem, UsageError, sequence_diagnostics
from .seeding import SeedLike, as_generator
from .teach import (
    STATUS_EXHAUSTED,
    STATUS_TOLERANCE_MET,
    STATUS_UNREACHABLE,
    TeachingSequence,
)

VOTE_ATOL = 1e-12


class NothingInformativeError(UsageError):
    """Every remaining cell is labeled unanimously; no example can teach."""


@dataclass(frozen=True)
class Cell:
    """Examples sharing one sign signature across the hypothesis class."""

    signature: tuple[int, ...]
    member_ids: tuple[str, ...]


@dataclass(frozen=True)
class RelaxedGreedyConfig:
    """Policy knobs: conservative inconsistency weight and stopping target.

    w_o is the multiplicative weight the teacher assumes the learner applies
    to hypotheses contradicted by an example; 0.5 matches the logistic
    likelihood's worst case.  epsilon bounds the residual belief mass off
    the target at which teaching stops.
    """

    w_o: float = 0.5
    epsilon: float = 0.1
    max_len: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.w_o < 1:
            raise UsageError("w_o must lie strictly in (0, 1)")
        if not 0 < self.epsilon < 1:
            raise UsageError("epsilon must lie in (0, 1)")
        if self.max_len is not None and self.max_len < 1:
            raise UsageError("max_len must be >= 1")


@dataclass
class BeliefTrace:
    """Teacher-belief path: p^(t) vectors, odds-against-target, chosen ids."""

    belief_path: list[np.ndarray]
    eta_path: list[float]
    chosen: list[str]


def eta(belief: np.ndarray, target_index: int) -> float:
    """Odds the belief places against the target: (1 - p*) / p*."""
    p_target = float(belief[target_index])
    return (1.0 - p_target) / p_target


def build_cells(problem: TeachingProblem) -> list[Cell]:
    """Partition the teaching set by hypothesis-signature, in first-seen order."""
    groups: dict[tuple[int, ...], list[str]] = {}
    for j, x in enumerate(problem.teaching_set):
        signature = tuple(int(s) for s in problem.signs[:, j])
        groups.setdefault(signature, []).append(x.id)
    return [Cell(signature=sig, member_ids=tuple(ids)) for sig, ids in groups.items()]


def cells_are_neighbors(a: Cell, b: Cell) -> bool:
    """True when the signatures differ in exactly one hypothesis."""
    if a.signature == b.signature:
        raise UsageError("neighbor test requires distinct cells")
    if len(a.signature) != len(b.signature):
        raise UsageError("cells come from different decompositions")
    return sum(sa != sb for sa, sb in zip(a.signature, b.signature)) == 1


def richness(problem: TeachingProblem) -> int:
    """Minimum member count over realized cells."""
    return min(len(c.member_ids) for c in build_cells(problem))


def _cell_votes(belief: np.ndarray, cells: Sequence[Cell]) -> np.ndarray:
    signatures = np.array([c.signature for c in cells], dtype=float)
    return signatures @ belief


def _informative(cell: Cell) -> bool:
    return len(set(cell.signature)) > 1


def select_example(
    belief: np.ndarray,
    cells: Sequence[Cell],
    rng: SeedLike,
    exclude: frozenset[str] = frozenset(),
) -> str:
    """Pick the next example id under the relaxed-greedy rule.

    If a neighboring bipolar pair exists (first found scanning cells in
    index order), one of its two cells is chosen uniformly; any cell with
    unshown members can serve as a pole.  Otherwise the cell with
    disagreement in its signature minimizing |weighted vote| wins (ties to
    the lowest cell index).  The member is drawn uniformly from the cell's
    unshown examples.  Votes within VOTE_ATOL of zero count as balanced,
    never as a pole: a balanced cell's sign is pure summation noise.
    """
    gen = as_generator(rng)
    active = [
        (i, c, [m for m in c.member_ids if m not in exclude]) for i, c in enumerate(cells)
    ]
    active = [(i, c, members) for i, c, members in active if members]
    informative = [slot for slot, (_, c, _) in enumerate(active) if _informative(c)]
    if not informative:
        raise NothingInformativeError("all remaining cells are unanimous or exhausted")

    votes = _cell_votes(belief, [c for _, c, _ in active])

    pair = None
    for a in range(len(active)):
        for b in range(a + 1, len(active)):
            if (
                min(abs(votes[a]), abs(votes[b])) > VOTE_ATOL
                and votes[a] * votes[b] < 0
                and cells_are_neighbors(active[a][1], active[b][1])
            ):
                pair = (a, b)
                break
        if pair:
            break

    if pair is not None:
        slot = pair[int(gen.integers(2))]
    else:
        slot = informative[int(np.argmin(np.abs(votes[informative])))]
    members = active[slot][2]
    return members[int(gen.integers(len(members)))]


def update_teacher_belief(
    belief: np.ndarray,
    example_id: str,
    problem: TeachingProblem,
    config: RelaxedGreedyConfig,
) -> np.ndarray:
    """Down-weight hypotheses contradicted by the example by w_o, renormalize."""
    idx = problem.example_index(example_id)
    updated = belief * np.where(problem.inconsistent[:, idx], config.w_o, 1.0)
    return updated / updated.sum()


def relaxed_greedy_teach(
    problem: TeachingProblem,
    config: RelaxedGreedyConfig,
    rng: SeedLike = None,
) -> tuple[TeachingSequence, BeliefTrace]:
    """Teach until the belief off the target drops to epsilon (or a cap).

    Returns the chosen sequence plus the belief trace (belief vector and
    odds-against-target before teaching and after every step).
    """
    gen = as_generator(rng)
    cells = build_cells(problem)
    belief = problem.prior.copy()
    trace = BeliefTrace(
        belief_path=[belief.copy()],
        eta_path=[eta(belief, problem.target_index)],
        chosen=[],
    )
    status = STATUS_UNREACHABLE
    while True:
        if 1.0 - belief[problem.target_index] <= config.epsilon:
            status = STATUS_TOLERANCE_MET
            break
        if config.max_len is not None and len(trace.chosen) >= config.max_len:
            status = STATUS_EXHAUSTED
            break
        try:
            example_id = select_example(
                belief, cells, gen, exclude=frozenset(trace.chosen)
            )
        except NothingInformativeError:
            status = STATUS_UNREACHABLE
            break
        belief = update_teacher_belief(belief, example_id, problem, config)
        trace.chosen.append(example_id)
        trace.belief_path.append(belief.copy())
        trace.eta_path.append(eta(belief, problem.target_index))

    sequence = TeachingSequence(
        example_ids=list(trace.chosen),
        per_step=sequence_diagnostics(problem, trace.chosen),
        status=status,
        policy="rgtp",
    )
    return sequence, trace


def export_belief_csv(trace: BeliefTrace, target_index: int, path: str | Path) -> None:
    """Write (step, p(target), eta) rows for plotting belief decay."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "p_target", "eta"])
        for step, (belief, e) in enumerate(zip(trace.belief_path, trace.eta_path)):
            writer.writerow([step, repr(float(belief[target_index])), repr(e)])
