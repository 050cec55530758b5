"""Parse, validate and reason over RTMML, a standoff markup for Reichenbach's
speech, event and reference time points."""

from .algebra import (
    AFTER,
    BEFORE,
    EQUAL,
    FULL,
    RelationSet,
    Tense,
    TenseProfile,
    View,
    classify_tense,
    compose,
    converse,
    intersect,
    tense_to_relations,
)
from .graph import ConstraintGraph, InconsistentAnnotation, add_constraint, build_graph
from .model import (
    AnnotatedDocument,
    DocAnn,
    LinkAnn,
    PointRef,
    TimePointId,
    TimeRefAnn,
    Token,
    VerbAnn,
)
from .parser import (
    RTMMLParseError,
    RTMMLValidationError,
    ValidationReport,
    parse_rtmml,
    read_rtmml,
    serialize_rtmml,
    validate,
)
from .reasoner import (
    ClosureResult,
    anchor_report,
    close,
    event_order,
    oracle_minimal_labels,
    query_relation,
)
from .timeml import import_timeml
from .tokenizer import resolve_target, tokenize

__version__ = "0.1.0"
