from ._causalbounds import (
    ConfigError,
    NumericError,
    bounds,
    builtin_instance,
    evaluate_query,
    frechet_bounds,
    run_experiment,
    sample,
    write_report,
)

__all__ = [
    "ConfigError",
    "NumericError",
    "bounds",
    "builtin_instance",
    "evaluate_query",
    "frechet_bounds",
    "run_experiment",
    "sample",
    "write_report",
]
