"""Property-based tests for logging and persistence functionality."""

import json
import logging
import os
import shutil
import tempfile
from contextlib import contextmanager

import pytest
from hypothesis import given, settings, strategies as st

import src.logger as logger_module
from src.logger import RUN_PREFIX, CertificationLogger, LongNumberFormatter, get_logger
from src.models import CandidateSet, CandidateVerdict, CertificationReport
from src.scalars import Scalar


@contextmanager
def temp_directory():
    """Context manager for creating and cleaning up temporary directories."""
    temp_dir = tempfile.mkdtemp()
    try:
        yield temp_dir
    finally:
        for name in ("coxhess.runs", "coxhess.errors", "coxhess.system"):
            for handler in list(logging.getLogger(name).handlers):
                handler.close()
                logging.getLogger(name).removeHandler(handler)
        shutil.rmtree(temp_dir, ignore_errors=True)


def _report(label="H3", det=Scalar(-120)):
    report = CertificationReport(
        label=label,
        rank=3,
        degrees=[2, 6, 10],
        degree_source="computed",
        orbit_size=12,
        v=(Scalar(1), Scalar(2), Scalar(3)),
        numerator=[1, 0, 1],
        numerator_source="computed",
        jacobian_determinant=det,
        jacobian_nonzero=not det.is_zero(),
        regular=True,
        candidate_sets=[CandidateVerdict(CandidateSet(3, ((0, 0),)), Scalar(3), True)],
        timings={'total': 1.23456},
    )
    report.decide()
    return report


def _format(formatter, message):
    record = logging.LogRecord("test", logging.INFO, __file__, 1, message, None, None)
    return formatter.format(record)


class TestLongNumberFormatter:
    """Long integers are shortened in log lines only."""

    @given(digits=st.integers(min_value=61, max_value=400))
    @settings(max_examples=50)
    def test_long_integers_are_abbreviated(self, digits):
        formatter = LongNumberFormatter('%(message)s')
        number = "7" + "3" * (digits - 1)
        line = _format(formatter, f"det = -{number}")
        assert line == f"det = -{number[:12]}...{number[-12:]} ({digits} digits)"

    @given(number=st.integers(min_value=-10 ** 59, max_value=10 ** 59))
    @settings(max_examples=50)
    def test_short_integers_are_kept(self, number):
        formatter = LongNumberFormatter('%(message)s')
        assert _format(formatter, f"value {number}") == f"value {number}"


class TestCertificationLogging:
    """Run, error and system logs."""

    def test_certification_is_logged_as_json(self):
        with temp_directory() as log_dir:
            run_log = CertificationLogger(log_dir)
            run_log.log_certification(_report())
            run_log.log_certification(_report("F4", Scalar(10) ** 100))
            history = run_log.get_run_history()
            assert [run['label'] for run in history] == ["H3", "F4"]
            assert history[0]['verdict'] == "PASS"
            assert history[0]['timings'] == {'total': 1.235}
            assert history[0]['jacobian_determinant'] == "-120"
            with open(os.path.join(log_dir, "runs.log"), encoding='utf-8') as f:
                content = f.read()
            assert content.count(RUN_PREFIX) == 2

    def test_long_determinant_in_history_is_abbreviated(self):
        with temp_directory() as log_dir:
            run_log = CertificationLogger(log_dir)
            run_log.log_certification(_report("E8", Scalar(10) ** 100))
            history = run_log.get_run_history()
            assert history[0]['jacobian_determinant'].endswith("(101 digits)")

    def test_error_log_contains_context(self):
        with temp_directory() as log_dir:
            run_log = CertificationLogger(log_dir)
            try:
                raise ValueError("bad point")
            except ValueError as e:
                run_log.log_error(e, "certify H3")
            with open(os.path.join(log_dir, "errors.log"), encoding='utf-8') as f:
                content = f.read()
            assert "certify H3 - ERROR: ValueError: bad point" in content
            assert "Stack Trace" in content

    @pytest.mark.parametrize("level", ["INFO", "WARNING", "ERROR", "debug"])
    def test_system_events(self, level):
        with temp_directory() as log_dir:
            run_log = CertificationLogger(log_dir)
            run_log.log_system_event(f"event at {level}", level)
            with open(os.path.join(log_dir, "system.log"), encoding='utf-8') as f:
                assert f"event at {level}" in f.read()

    def test_loggers_do_not_propagate(self):
        with temp_directory() as log_dir:
            run_log = CertificationLogger(log_dir)
            assert not run_log.run_logger.propagate
            assert len(run_log.run_logger.handlers) == 1
            CertificationLogger(log_dir)
            assert len(logging.getLogger("coxhess.runs").handlers) == 1


class TestReportPersistence:
    """JSON reports."""

    def test_save_report(self):
        with temp_directory() as log_dir:
            run_log = CertificationLogger(log_dir)
            path = os.path.join(log_dir, "reports", "h3.json")
            run_log.save_report(_report().to_dict(), path)
            with open(path, encoding='utf-8') as f:
                loaded = json.load(f)
            assert loaded['label'] == "H3"
            assert loaded['candidate_sets'][0]['labels'] == ["rho1", "rho2", "rho3", "rho1^2"]
            with open(os.path.join(log_dir, "system.log"), encoding='utf-8') as f:
                assert f"Report saved to {path}" in f.read()


def test_get_logger_is_a_singleton(monkeypatch):
    monkeypatch.setattr(logger_module, "_logger_instance", None)
    with temp_directory() as log_dir:
        first = get_logger(log_dir)
        assert get_logger("elsewhere") is first
        assert first.log_dir == log_dir
