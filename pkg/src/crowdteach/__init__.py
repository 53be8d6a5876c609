"""Noise-tolerant machine teaching toolkit.

Greedy teaching policies over a finite linear hypothesis class, a stochastic
learner simulator, synthetic problem generation, a population experiment
harness, and a teach-then-test HTTP session service.
"""

from .core import (
    Example,
    Hypothesis,
    HypothesisClass,
    PosteriorTracker,
    TeachingProblem,
    UsageError,
    difficulty,
    error_rate,
    expected_error,
    likelihood,
    new_tracker,
    normalized_posterior,
    predict,
    update_tracker,
)
from .learner import LearnerState, RolloutTrace, init_learner, learner_observe, learner_predict, rollout
from .teach import (
    ErrorCertificate,
    TeachConfig,
    TeachingSequence,
    error_certificate,
    random_teach,
    setcover_teach,
    strict_teach,
    surrogate_F,
)
from .relaxed_greedy import (
    BeliefTrace,
    Cell,
    RelaxedGreedyConfig,
    build_cells,
    cells_are_neighbors,
    relaxed_greedy_teach,
    richness,
)
from .datagen import (
    VwHypothesisParams,
    VwParams,
    enforce_realizability,
    generate_vw,
    generate_vw_hypotheses,
    load_problem,
    make_vw_problem,
    save_problem,
    select_target,
)
from .harness import (
    PolicySpec,
    SimulationReport,
    WelchResult,
    difficulty_curve,
    lemma1_check,
    simulate_population,
    welch_t_test,
    write_report_csv,
)

__version__ = "0.1.0"
