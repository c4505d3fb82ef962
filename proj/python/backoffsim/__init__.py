"""Windowed backoff under batched arrivals: simulation and verification toolkit."""

from ._core import (  # noqa: F401
    CapExceededError,
    DegenerateRatioError,
    DomainError,
    PreconditionError,
    RegimeError,
    ResourceError,
    __version__,
    check_pj_monotone,
    check_property1,
    chernoff_lower_tail,
    chernoff_upper_tail,
    classify_regime,
    concentration_experiment,
    cond_prob_pj,
    enumerate_joint_singleton_prob,
    enumerate_mgf_sides,
    expected_singletons,
    joint_singleton_prob_closed,
    last_window_experiment,
    makespan_experiment,
    pj_ratio_direct,
    pj_ratio_expansion,
    place_balls,
    recursion_audit,
    run_protocol,
    simulate_singletons,
    singleton_bounds,
    window_sizes,
)
