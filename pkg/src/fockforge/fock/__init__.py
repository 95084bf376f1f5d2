"""Truncated full Fock space over a time grid, increment nets, and exact vacuum moments."""
from .moments import ANN, CRE, PRES, SCAL, OperatorWord, OpPoly, net_vacuum_moment, stack_net_moment, vacuum_moment
from .nets import (
    additive_increment,
    cocycle_defect,
    estimate_U,
    evolution_defect,
    example_one_theta,
    h_increment,
    op_norm,
    theta,
    time_shift,
    truncated_net_moment,
    unitarity_defect,
    upsilon,
)
from .space import (
    Amplitude,
    FockOp,
    GridSpec,
    OffGridError,
    SupportOverflowError,
    annihilation,
    creation,
    identity,
    preservation,
)

__all__ = [
    "ANN",
    "CRE",
    "PRES",
    "SCAL",
    "OperatorWord",
    "OpPoly",
    "net_vacuum_moment",
    "stack_net_moment",
    "vacuum_moment",
    "additive_increment",
    "cocycle_defect",
    "estimate_U",
    "evolution_defect",
    "example_one_theta",
    "h_increment",
    "op_norm",
    "theta",
    "time_shift",
    "truncated_net_moment",
    "unitarity_defect",
    "upsilon",
    "Amplitude",
    "FockOp",
    "GridSpec",
    "OffGridError",
    "SupportOverflowError",
    "annihilation",
    "creation",
    "identity",
    "preservation",
]
