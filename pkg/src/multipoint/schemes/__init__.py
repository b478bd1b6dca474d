"""Iteration schemes: weighted families and comparison methods."""

from .methods import (
    METHODS,
    DegenerateGeometryError,
    MethodParameterError,
    MethodSpec,
    SchemeError,
    StepOutcome,
    Trace,
    UnknownMethodError,
    ZeroDerivativeError,
    declared_orders,
    four_point_step,
    geum_kim1_step,
    geum_kim2_step,
    get_method,
    khattri_steihaug_step,
    kung_traub8_step,
    kung_traub16_step,
    method_labels,
    neta8_step,
    neta16_step,
    newton_step,
    run,
    step,
    three_point_step,
    two_point_step,
    weighted_method,
)
from .weights import (
    ConditionReport,
    ConditionResult,
    WeightSet,
    check_weight_conditions,
    proposed_weight_sets,
    three_point_weight_set,
)
