"""Anchored distributed temporal logic: formulas, lasso semantics, tableau
automata, distributed Büchi products and satisfiability checking."""

from .automata import (
    CounterState,
    Gnba,
    LassoRun,
    Nba,
    degeneralize,
    find_accepting_lasso,
    gnba_lasso_accepts,
    nba_lasso_accepts,
)
from .bridge import (
    IsomorphismWitness,
    Linearization,
    build_canonical_run,
    default_linearization,
    iso_check,
    structure_to_word,
    word_to_structure,
)
from .errors import (
    DtlError,
    LabelMismatch,
    ParseError,
    PreconditionFailed,
    ResourceLimitExceeded,
    SignatureError,
    UnfairWordError,
)
from .formula import (
    Always,
    And,
    At,
    Bottom,
    Comm,
    DistributedSignature,
    Eventually,
    Formula,
    FormulaSet,
    Imp,
    Next,
    Not,
    Or,
    Prop,
    Top,
    closure,
    pretty,
    render,
    subformulas_global,
    subformulas_local,
    valuations,
)
from .parser import parse_global, parse_local
from .product import (
    ConstrainedDnba,
    Dnba,
    build_product,
    constrain_dtl,
    decide,
    dnba_lasso_accepts,
    dtl_automaton,
    project_run,
    satisfiable,
)
from .semantics import LassoStructure, always_fixpoint_check, derive_structure, sat_global, sat_local
from .tableau import ElementarySet, brute_force_elementary, build_local_gnba, enumerate_elementary, local_language_check
from .words import GlobalLetter, LassoWord, is_fair, project_word

__version__ = "0.1.0"
