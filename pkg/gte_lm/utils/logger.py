"""
Structured run logging.

Solvers, checkers and the bench keep their events as records, so ``solve
--log-json`` can dump them, and forward each one to ``gte_lm.<source>``.
"""

import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Dict, List


@dataclass
class LogEntry:
    timestamp: str
    source: str
    level: str
    message: str
    metadata: Dict[str, Any] = field(default_factory=dict)


class RunLogger:
    """Records of one solver, checker or batch run."""

    def __init__(self, source: str):
        self.source = source
        self.entries: List[LogEntry] = []
        self.logger = logging.getLogger(f"gte_lm.{source}")

    def _record(self, level: int, message: str, metadata: Dict[str, Any]):
        self.entries.append(LogEntry(
            timestamp=datetime.now().isoformat(),
            source=self.source,
            level=logging.getLevelName(level),
            message=message,
            metadata=metadata
        ))
        self.logger.log(level, message)

    def info(self, message: str, **metadata):
        self._record(logging.INFO, message, metadata)

    def debug(self, message: str, **metadata):
        """Per-iteration events; only forwarded to stderr under ``-v``."""
        self._record(logging.DEBUG, message, metadata)

    def to_records(self) -> List[Dict[str, Any]]:
        """Entries as plain dicts, ready for JSON."""
        return [asdict(e) for e in self.entries]

    def clear(self):
        self.entries = []
