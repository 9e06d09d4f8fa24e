"""
Run Logger - Captures solver and analysis activity for the CLI and tests.

Records are kept as (level, message) pairs and echoed to stderr so stdout
stays free for JSON reports. Only the newest `max_records` are retained.
"""

import sys
import threading
from collections import deque
from contextlib import contextmanager
from typing import Callable, Deque, List, Optional, Tuple

DEFAULT_MAX_RECORDS = 10_000


class RunLogger:
    """Thread-safe logger that keeps the most recent records of the current run"""

    def __init__(self, echo: bool = True, stream=None, max_records: int = DEFAULT_MAX_RECORDS):
        if max_records < 1:
            raise ValueError("max_records must be at least 1")
        self.logs: Deque[Tuple[str, str]] = deque(maxlen=max_records)  # (log_level, message)
        self.lock = threading.Lock()
        self.callback: Optional[Callable] = None
        self.echo = echo
        self.stream = stream
        self._captures: List[List[Tuple[str, str]]] = []

    def clear(self):
        """Clear all logs"""
        with self.lock:
            self.logs.clear()

    def set_callback(self, callback: Optional[Callable]):
        """Set a callback function to be called when new logs are added"""
        with self.lock:
            self.callback = callback

    def add_log(self, message: str, level: Optional[str] = None):
        """Add a log message and trigger callback if set"""
        if level is None:
            level = self.get_level(message)
        with self.lock:
            self.logs.append((level, message))
            for captured in self._captures:
                captured.append((level, message))
            if self.echo:
                stream = self.stream or sys.stderr
                print(message, file=stream)
            if self.callback:
                try:
                    self.callback(level, message)
                except Exception as e:
                    # callback errors must not break logging
                    print(f"Logger callback error: {e}", file=sys.__stderr__)

    def info(self, message: str):
        self.add_log(message, "info")

    def warning(self, message: str):
        self.add_log(message, "warning")

    def error(self, message: str):
        self.add_log(message, "error")

    def success(self, message: str):
        self.add_log(message, "success")

    def get_logs(self):
        """Get the retained logs"""
        with self.lock:
            return list(self.logs)

    def get_level(self, line: str) -> str:
        """Determine log level based on emoji/prefix"""
        lowered = line.lower()
        if "❌" in line or "failed" in lowered or "error" in lowered:
            return "error"
        elif "⚠️" in line or "warning" in lowered:
            return "warning"
        elif "✅" in line or "complete" in lowered:
            return "success"
        elif any(emoji in line for emoji in ["🔍", "📐", "🎯", "🧭", "🚀", "⚙️"]):
            return "stage"
        return "info"

    @contextmanager
    def capture_logs(self, echo: Optional[bool] = None):
        """Collect every record logged inside the block, regardless of max_records.

        Args:
            echo: override stderr echo for the duration of the block.
        """
        captured: List[Tuple[str, str]] = []
        previous_echo = self.echo
        with self.lock:
            if echo is not None:
                self.echo = echo
            self._captures.append(captured)
        try:
            yield captured
        finally:
            with self.lock:
                self._captures.remove(captured)
                self.echo = previous_echo


# Global logger instance
_logger: Optional[RunLogger] = None


def get_logger() -> RunLogger:
    """Get the global logger instance"""
    global _logger
    if _logger is None:
        from utils.config import log_capacity, verbose_enabled
        _logger = RunLogger(echo=verbose_enabled(), max_records=log_capacity())
    return _logger
