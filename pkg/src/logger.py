"""Logging and persistence module for coxhess.

This module provides:
- One JSON line per finished certification
- Error logging with stack traces
- JSON report persistence
- Abbreviation of very long integers in log lines
- Daily log file rotation
"""

import json
import logging
import os
import re
import traceback
from datetime import datetime
from logging.handlers import TimedRotatingFileHandler
from typing import Any, Dict, List, Optional

from src.models import CertificationReport

RUN_PREFIX = "CERTIFICATION_FINISHED:"


class LongNumberFormatter(logging.Formatter):
    """Formatter that shortens integers longer than `max_digits` digits.

    E8 determinants run to hundreds of digits; log lines keep the ends and the
    digit count, reports keep the full value.
    """

    def __init__(self, fmt: Optional[str] = None, datefmt: Optional[str] = None,
                 max_digits: int = 60, keep: int = 12):
        super().__init__(fmt, datefmt)
        self.max_digits = max_digits
        self.keep = keep
        self.pattern = re.compile(r'-?\d{%d,}' % (max_digits + 1))

    def format(self, record: logging.LogRecord) -> str:
        message = super().format(record)
        return self.pattern.sub(self._abbreviate, message)

    def _abbreviate(self, match: re.Match) -> str:
        text = match.group(0)
        sign = "-" if text.startswith("-") else ""
        digits = text.lstrip("-")
        return f"{sign}{digits[:self.keep]}...{digits[-self.keep:]} ({len(digits)} digits)"


class CertificationLogger:
    """Main logging class for certification runs.

    Provides methods for:
    - Run logging (one JSON line per report)
    - Error logging with stack traces
    - Report persistence
    - General system logging
    """

    def __init__(self, log_dir: str = "logs"):
        """Initialize the certification logger.

        Args:
            log_dir: Directory to store log files
        """
        self.log_dir = log_dir
        self._ensure_log_directory()

        self.run_logger = self._setup_logger("coxhess.runs", "runs.log", logging.INFO)
        self.error_logger = self._setup_logger(
            "coxhess.errors", "errors.log", logging.ERROR,
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s\n%(exc_info)s')
        self.system_logger = self._setup_logger("coxhess.system", "system.log", logging.INFO)

    def _ensure_log_directory(self) -> None:
        os.makedirs(self.log_dir, exist_ok=True)

    def _setup_logger(self, name: str, filename: str, level: int,
                      fmt: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s') -> logging.Logger:
        """Set up one logger with daily rotation.

        Returns:
            Configured logger writing to log_dir/filename
        """
        logger = logging.getLogger(name)
        logger.setLevel(level)
        logger.propagate = False

        for handler in list(logger.handlers):
            handler.close()
        logger.handlers.clear()

        handler = TimedRotatingFileHandler(
            os.path.join(self.log_dir, filename),
            when="midnight",
            interval=1,
            backupCount=30,  # Keep 30 days of logs
            encoding="utf-8"
        )
        handler.suffix = "%Y-%m-%d"
        handler.setFormatter(LongNumberFormatter(fmt, datefmt='%Y-%m-%d %H:%M:%S'))

        logger.addHandler(handler)
        return logger

    def log_certification(self, report: CertificationReport) -> None:
        """Log a finished certification as one JSON line.

        Args:
            report: Finished report
        """
        run_data = {
            "timestamp": datetime.now().isoformat(),
            "label": report.label,
            "verdict": report.verdict,
            "degrees": list(report.degrees),
            "orbit_size": report.orbit_size,
            "numerator_source": report.numerator_source,
            "candidate_sets": len(report.candidate_sets),
            "jacobian_determinant": report.jacobian_determinant.serialize(),
            "warnings": list(report.warnings),
            "timings": {k: round(t, 3) for k, t in report.timings.items()},
        }
        self.run_logger.info(f"{RUN_PREFIX} {json.dumps(run_data)}")

    def log_error(self, error: Exception, context: Optional[str] = None) -> None:
        """Log an error with full stack trace.

        Args:
            error: Exception that occurred
            context: Optional context description
        """
        error_message = f"ERROR: {type(error).__name__}: {error}"
        if context:
            error_message = f"{context} - {error_message}"

        stack_trace = traceback.format_exc()

        self.error_logger.error(f"{error_message}\nStack Trace:\n{stack_trace}")

    def log_system_event(self, message: str, level: str = "INFO") -> None:
        """Log a general system event.

        Args:
            message: Log message
            level: Log level (INFO, WARNING, ERROR)
        """
        level = level.upper()

        if level == "WARNING":
            self.system_logger.warning(message)
        elif level == "ERROR":
            self.system_logger.error(message)
        else:
            self.system_logger.info(message)

    def save_report(self, report: Dict[str, Any], output_file: str) -> None:
        """Save a JSON report (already converted with to_dict).

        Args:
            report: Report dictionary
            output_file: Output file path
        """
        output_dir = os.path.dirname(output_file)
        if output_dir and not os.path.exists(output_dir):
            os.makedirs(output_dir, exist_ok=True)

        with open(output_file, 'w', encoding='utf-8') as f:
            json.dump(report, f, indent=2)

        self.system_logger.info(f"Report saved to {output_file}")

    def get_run_history(self) -> List[Dict[str, Any]]:
        """Finished certifications recorded in the current runs.log.

        Returns:
            List of run dictionaries, oldest first
        """
        runs = []
        run_log_path = os.path.join(self.log_dir, "runs.log")

        if os.path.exists(run_log_path):
            with open(run_log_path, 'r', encoding='utf-8') as f:
                for line in f:
                    if RUN_PREFIX in line:
                        try:
                            json_start = line.index("{")
                            runs.append(json.loads(line[json_start:]))
                        except (ValueError, json.JSONDecodeError):
                            continue

        return runs


# Global logger instance
_logger_instance: Optional[CertificationLogger] = None


def get_logger(log_dir: str = "logs") -> CertificationLogger:
    """Get or create the global logger instance.

    Args:
        log_dir: Directory to store log files

    Returns:
        CertificationLogger instance
    """
    global _logger_instance

    if _logger_instance is None:
        _logger_instance = CertificationLogger(log_dir)

    return _logger_instance
