"""Tests for JobMonitor progress tracking and memory warnings."""

import threading
import time
from unittest.mock import Mock, patch

from hypothesis import given, settings, strategies as st

from src.job_monitor import JobHealth, JobMonitor


@given(blocks=st.lists(st.integers(min_value=0, max_value=10_000), max_size=50))
@settings(max_examples=50, deadline=None)
def test_progress_counts_every_block(blocks):
    """Recorded blocks and elements add up exactly."""
    monitor = JobMonitor("F4", blocks_total=max(len(blocks), 1))
    for elements in blocks:
        monitor.record_block(elements)
    summary = monitor.get_status_summary()
    assert summary['blocks_done'] == len(blocks)
    assert summary['elements_done'] == sum(blocks)
    assert summary['running'] is False


def test_record_block_is_thread_safe():
    monitor = JobMonitor("E6", blocks_total=400)

    def worker():
        for _ in range(100):
            monitor.record_block(3)

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert monitor.blocks_done == 400
    assert monitor.elements_done == 1200


def test_progress_fraction():
    health = JobHealth(time.time(), 3, 12, 0, 10.0, False)
    assert health.progress() == 0.25
    assert JobHealth(time.time(), 0, 0, 0, 10.0, False).progress() == 0.0


def _process(mock_process, percent):
    mock_process.return_value.memory_percent.return_value = percent


@patch('src.job_monitor.psutil.Process')
def test_memory_warning_threshold(mock_process):
    monitor = JobMonitor("E7", blocks_total=10, memory_warning_percent=80.0)
    _process(mock_process, 79.9)
    assert not monitor.check_health().memory_warning
    _process(mock_process, 80.0)
    assert monitor.check_health().memory_warning
    assert len(monitor.history) == 2


@patch('src.job_monitor.psutil.virtual_memory')
@patch('src.job_monitor.psutil.Process')
def test_memory_is_measured_for_this_process(mock_process, mock_memory):
    """A busy machine does not trigger warnings for a small job."""
    mock_memory.return_value = Mock(percent=99.0)
    _process(mock_process, 1.5)
    health = JobMonitor("F4", blocks_total=1).check_health()
    assert health.memory_usage_percent == 1.5
    assert not health.memory_warning
    mock_memory.assert_not_called()


def test_real_process_memory_is_a_percentage():
    health = JobMonitor("A2", blocks_total=1).check_health()
    assert 0.0 < health.memory_usage_percent <= 100.0


@patch('src.job_monitor.psutil.Process')
def test_history_is_bounded(mock_process):
    _process(mock_process, 10.0)
    monitor = JobMonitor("H4", blocks_total=1)
    for _ in range(150):
        monitor.check_health()
    assert len(monitor.history) == 100


@patch('src.job_monitor.psutil.Process')
def test_background_loop_notifies_on_high_memory(mock_process):
    _process(mock_process, 95.0)
    callback = Mock()
    with JobMonitor("E8", blocks_total=5, check_interval=1, notification_callback=callback) as monitor:
        deadline = time.time() + 5
        while not callback.called and time.time() < deadline:
            time.sleep(0.05)
        assert monitor.get_status_summary()['running'] is True
    callback.assert_called()
    message, level = callback.call_args[0]
    assert "95.0%" in message
    assert level == "WARNING"
    assert monitor.get_status_summary()['running'] is False


def test_callback_errors_are_contained():
    callback = Mock(side_effect=RuntimeError("display gone"))
    monitor = JobMonitor("A3", blocks_total=1, notification_callback=callback)
    monitor._notify("test", "WARNING")
    callback.assert_called_once_with("test", "WARNING")
