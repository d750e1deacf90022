"""Weight-sequence calculus in the log domain.

Growth-condition checkers with certificates, associated functions, growth
indices, the tilde transform, prescribed-index constructions and exact
moments of the kernel surrogate.
"""

from .sequences import (
    HorizonError,
    ParameterError,
    PreconditionError,
    WeightSequence,
    WsqError,
    check,
    deltas,
    hat,
    log_term,
    make_sequence,
    parse_spec,
    product,
    shift,
    tilde,
)

__all__ = [
    "HorizonError",
    "ParameterError",
    "PreconditionError",
    "WeightSequence",
    "WsqError",
    "check",
    "deltas",
    "hat",
    "log_term",
    "make_sequence",
    "parse_spec",
    "product",
    "shift",
    "tilde",
]
