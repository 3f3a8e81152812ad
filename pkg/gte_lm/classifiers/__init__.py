from .base import FALSIFY_TOL, BaseChecker, CheckerRegistry
from .error_bound import ERROR_BOUND_CONSTANT, singular_cube_problem, verify_error_bound_example
from .sampling import (
    PDChecker,
    PTensorChecker,
    SamplingChecker,
    StrictPDChecker,
    StrongPChecker,
    check_p_tensor,
    check_pd,
    check_strict_pd,
    check_strong_p,
    sign_grid,
)
from .singular import SingularChecker, check_singular
from .zplus import ZPlus2DChecker, check_z_plus_2d, p_test_directions, solution_directions

CLASS_NAMES = ("p", "strong-p", "pd", "strict-pd", "singular", "zplus2d")


def default_registry() -> CheckerRegistry:
    """Registry keyed by the ``classify --class`` names."""
    registry = CheckerRegistry()
    for checker in (PTensorChecker(), StrongPChecker(), PDChecker(), StrictPDChecker(),
                    SingularChecker(), ZPlus2DChecker()):
        registry.register(checker.name, checker)
    return registry


__all__ = [
    "FALSIFY_TOL",
    "BaseChecker",
    "CheckerRegistry",
    "SamplingChecker",
    "PTensorChecker",
    "StrongPChecker",
    "PDChecker",
    "StrictPDChecker",
    "SingularChecker",
    "ZPlus2DChecker",
    "CLASS_NAMES",
    "default_registry",
    "check_p_tensor",
    "check_strong_p",
    "check_pd",
    "check_strict_pd",
    "check_singular",
    "check_z_plus_2d",
    "solution_directions",
    "p_test_directions",
    "sign_grid",
    "verify_error_bound_example",
    "singular_cube_problem",
    "ERROR_BOUND_CONSTANT",
]
