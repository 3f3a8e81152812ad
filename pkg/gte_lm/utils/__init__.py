from .logger import LogEntry, RunLogger

__all__ = ["LogEntry", "RunLogger"]
