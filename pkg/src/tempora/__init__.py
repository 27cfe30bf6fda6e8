"""Inconsistency handling for DatalogMTL datasets over the integer timeline."""

from .errors import (ArityError, CapExceededError, DivergenceError, EmptyIntervalError,
                     EngineError, InconsistentInputError, NoRepairsError,
                     NotNormalFormError, ParseError, SafetyError, TemporaError,
                     UnboundedDatasetError, UnsupportedError, WindowTooSmallError)
from .facts import (FactSet, GroundAtom, TemporalFact, is_bounded, is_normal_form,
                    models_fact, normalize, pointwise_intersection, subset_order,
                    strict_subset_order, tp_expand)
from .intervals import Interval, NEG_INF, POS_INF
from .reasoner import (EngineLimits, IntervalModel, certain_answers, entails_fact,
                       eval_literal, head_assert, is_consistent, materialize,
                       punctual_reference_model)
from .repairs import (RepairKind, enumerate_conflicts, enumerate_repairs,
                      generate_conflict, generate_repair, recognize_conflict,
                      recognize_repair, repairs_intersection)
from .semantics import SemanticsKind, SemanticsReport, answers_under, entails_under, \
    semantics_report
from .syntax import (FragmentReport, Program, Query, Rule, classify_fragment,
                     dataset_to_text, ground_program, parse_dataset, parse_fact,
                     parse_problem, parse_program, parse_query, program_to_text)

__version__ = "0.1.0"
