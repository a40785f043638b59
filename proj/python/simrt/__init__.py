"""Python bindings for the simrt scheduling simulator."""

from ._core import (
    SimrtError,
    Profile,
    Scenario,
    builtin_profile,
    builtin_profile_names,
    buffer_pressure,
    convolution_batch,
    derive_kernel_us,
    inference_comparison,
    load_profile,
    load_profile_file,
    load_scenario_file,
    parse_scenario,
    robot_pipeline,
    simulate,
    validate_graph,
)

__all__ = [
    "SimrtError",
    "Profile",
    "Scenario",
    "builtin_profile",
    "builtin_profile_names",
    "buffer_pressure",
    "convolution_batch",
    "derive_kernel_us",
    "inference_comparison",
    "load_profile",
    "load_profile_file",
    "load_scenario_file",
    "parse_scenario",
    "robot_pipeline",
    "simulate",
    "validate_graph",
]
