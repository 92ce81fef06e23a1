"""wsvar: weighted p-variation and length-constrained variation of step
functions, inclusion-criterion evidence, and comb counterexample witnesses.
"""

from .errors import (BudgetExceeded, ChainViolation, DomainError,
                     ExpressionSyntaxError, GuardExceeded, HorizonTooSmall,
                     MonotonicityViolation, NegativeInput, NonpositiveValue,
                     OutOfDomain, ResourceLimit, SortViolation,
                     UnknownIdentifier, WitnessNotFound, WsvarError)
from .seqspec import (ReciprocalSums, SequenceExpr, SequenceSpec, eval_at,
                      parse_sequence_expr, partial_sum_reciprocal,
                      validate_spec)
from .stepfn import (Interval, IntervalFamily, StepFunction, evaluate,
                     increment, monotone_extrema_points, random_step_function)
from .variation import (VariationReport, family_objective, lambda_p_variation,
                        lambda_p_variation_bruteforce, waterman_shiba_norm)
from .wiener import (WienerReport, is_degenerate_wiener, wiener_bruteforce,
                     wiener_variation)
from .criterion import (IndicatorProfile, IndicatorRow,
                        check_rearrangement_inequality,
                        check_sufficiency_bound, decide_inclusion,
                        goginava_indicator, hps_indicator, limsup_profile)
from .witness import (CombFunction, WitnessParams, build_witness,
                      cross_check_witness_small, find_witness_levels,
                      materialize_witness, verify_witness_norm,
                      verify_witness_variation_lowerbound)

__version__ = "0.1.0"
