from abc import ABC, abstractmethod
from typing import Dict, List, Optional

from ..models import CheckMethod, ClassReport, Verdict
from ..tensor import DenseTensor
from ..utils import RunLogger

FALSIFY_TOL = 1e-12


class BaseChecker(ABC):
    """Base class for tensor-class checkers."""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description
        self.logger = RunLogger(name)

    @abstractmethod
    def check(self, A: DenseTensor, **options) -> ClassReport:
        """Decide, falsify or fail to falsify the class property for ``A``."""
        pass

    def _create_report(
        self,
        verdict: Verdict,
        method: CheckMethod,
        samples_used: int = 0,
        witness=None,
        witness_pair=None,
        witness_value: Optional[float] = None,
        t: Optional[float] = None,
        message: str = ""
    ) -> ClassReport:
        """Create standardized checker report."""
        report = ClassReport(
            checker=self.name,
            verdict=verdict,
            method=method,
            samples_used=samples_used,
            witness=None if witness is None else [float(v) for v in witness],
            witness_pair=None if witness_pair is None else [float(v) for v in witness_pair],
            witness_value=None if witness_value is None else float(witness_value),
            t=None if t is None else float(t),
            message=message
        )
        self.logger.info(
            f"{self.name}: {verdict.value} ({method.value}, {samples_used} samples)",
            verdict=verdict.value,
            method=method.value,
            samples_used=samples_used
        )
        return report


class CheckerRegistry:
    """Registry mapping class names (``p``, ``strong-p``, ...) to checkers."""

    def __init__(self):
        self._checkers: Dict[str, BaseChecker] = {}

    def register(self, key: str, checker: BaseChecker):
        self._checkers[key] = checker

    def get_checker(self, key: str) -> Optional[BaseChecker]:
        return self._checkers.get(key)

    def list_checkers(self) -> List[str]:
        return list(self._checkers.keys())
