"""Authentication with universal hash families under partial key knowledge.

The package has four layers:

* :mod:`wcauth.families` builds and certifies epsilon-ASU2 hash families;
* :mod:`wcauth.keyspace` tracks what an eavesdropper knows about the key
  and when that knowledge enables a guaranteed forgery;
* :mod:`wcauth.bounds` evaluates the closed-form attack probabilities
  (exact rationals at desk scale, log2-space at deployment scale);
* :mod:`wcauth.protocol` simulates authentication rounds and Monte Carlo
  campaigns for both the plain two-message exchange and the salted
  three-message variant that restores the security ceiling.

Hot loops run on a compiled backend when available (see
:mod:`wcauth.kernels`).  The ``wcauth`` command line exposes the same
functionality; see ``wcauth --help``.
"""

from .bounds import (
    BoundParams,
    BoundReport,
    BreakTime,
    Log2Prob,
    average_success_before_tag,
    chebyshev_bound,
    conditional_success,
    engineered_attack_prob,
    expected_break_time,
    guess_prob_after_pair,
    guess_prob_partial,
    guess_prob_uniform,
    hypergeom_pmf,
    min_entropy_of_elimination,
    weak_pair_prob_exact,
)
from .errors import (
    BudgetError,
    ConfigError,
    DomainError,
    FamilyMismatchError,
    WcauthError,
)
from .families import (
    Asu2Certificate,
    FamilyShape,
    HashFamily,
    as_fraction,
    build_affine_family,
    build_block_family,
    build_table_family,
    eval_tag,
    family_from_json,
    family_to_json,
    verify_asu2,
    wc_key_length,
)
from .keyspace import (
    KeySet,
    PartitionProfile,
    certain_forgery,
    constraint_set,
    craft_influenced_message,
    forgeable_messages,
    intersect,
    partition_by_message,
    random_elimination,
)
from .protocol import (
    AdversaryStrategy,
    ProtocolVariant,
    RoundOutcome,
    RoundTranscript,
    SimConfig,
    SuccessStats,
    concat_for_tag,
    monte_carlo,
    run_round,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryStrategy",
    "Asu2Certificate",
    "BoundParams",
    "BoundReport",
    "BreakTime",
    "BudgetError",
    "ConfigError",
    "DomainError",
    "FamilyMismatchError",
    "FamilyShape",
    "HashFamily",
    "KeySet",
    "Log2Prob",
    "PartitionProfile",
    "ProtocolVariant",
    "RoundOutcome",
    "RoundTranscript",
    "SimConfig",
    "SuccessStats",
    "WcauthError",
    "as_fraction",
    "average_success_before_tag",
    "build_affine_family",
    "build_block_family",
    "build_table_family",
    "certain_forgery",
    "chebyshev_bound",
    "concat_for_tag",
    "conditional_success",
    "constraint_set",
    "craft_influenced_message",
    "engineered_attack_prob",
    "eval_tag",
    "expected_break_time",
    "family_from_json",
    "family_to_json",
    "forgeable_messages",
    "guess_prob_after_pair",
    "guess_prob_partial",
    "guess_prob_uniform",
    "hypergeom_pmf",
    "intersect",
    "min_entropy_of_elimination",
    "monte_carlo",
    "partition_by_message",
    "random_elimination",
    "run_round",
    "verify_asu2",
    "wc_key_length",
    "weak_pair_prob_exact",
]
