"""Progress and memory monitoring for long enumeration jobs.

This module provides:
- Block and element progress tracking for histogram runs
- Periodic checks in a background thread
- Memory usage warnings when this process holds more than 80% of system memory
"""

import logging
import threading
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import psutil


logger = logging.getLogger(__name__)


@dataclass
class JobHealth:
    """Snapshot of a running job."""
    timestamp: float
    blocks_done: int
    blocks_total: int
    elements_done: int
    memory_usage_percent: float
    memory_warning: bool

    def progress(self) -> float:
        """Fraction of blocks finished (0.0 to 1.0)."""
        if self.blocks_total <= 0:
            return 0.0
        return self.blocks_done / self.blocks_total


class JobMonitor:
    """Tracks a histogram job and warns on memory pressure.

    Checks run every `check_interval` seconds while started; record_block is
    safe to call from worker threads.
    """

    def __init__(
        self,
        label: str,
        blocks_total: int,
        check_interval: int = 30,
        memory_warning_percent: float = 80.0,
        notification_callback: Optional[Callable[[str, str], None]] = None
    ):
        """Initialize JobMonitor.

        Args:
            label: Group label of the job
            blocks_total: Number of blocks the job will process
            check_interval: Seconds between background checks
            memory_warning_percent: Threshold on this process's share of system memory
            notification_callback: Called with (message, level) on warnings
        """
        self.label = label
        self.blocks_total = blocks_total
        self.check_interval = check_interval
        self.memory_warning_percent = memory_warning_percent
        self.notification_callback = notification_callback
        self._process = psutil.Process()

        self.blocks_done = 0
        self.elements_done = 0
        self.started_at = time.time()
        self.history: List[JobHealth] = []

        self._lock = threading.Lock()
        self._monitoring_thread: Optional[threading.Thread] = None
        self._stop_monitoring = threading.Event()
        self._running = False

    def start(self):
        """Start background checks."""
        if self._running:
            logger.warning(f"JobMonitor for {self.label} already running")
            return
        self._running = True
        self._stop_monitoring.clear()
        self._monitoring_thread = threading.Thread(target=self._monitoring_loop, daemon=True)
        self._monitoring_thread.start()
        logger.info(f"JobMonitor started for {self.label} ({self.blocks_total} blocks)")

    def stop(self):
        """Stop background checks."""
        if not self._running:
            return
        self._running = False
        self._stop_monitoring.set()
        if self._monitoring_thread is not None:
            self._monitoring_thread.join(timeout=5)
        logger.info(f"JobMonitor stopped for {self.label}")

    def __enter__(self) -> "JobMonitor":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()

    def _monitoring_loop(self):
        while not self._stop_monitoring.is_set():
            try:
                health = self.check_health()
                logger.info(
                    f"{self.label}: {health.blocks_done}/{health.blocks_total} blocks, "
                    f"{health.elements_done} elements, memory={health.memory_usage_percent:.1f}%"
                )
                if health.memory_warning:
                    self._notify(f"High memory usage: {health.memory_usage_percent:.1f}%", "WARNING")
            except Exception as e:
                logger.error(f"Error in job monitoring loop: {e}", exc_info=True)
            self._stop_monitoring.wait(self.check_interval)

    def record_block(self, elements: int):
        """Count one finished block of `elements` group elements."""
        with self._lock:
            self.blocks_done += 1
            self.elements_done += elements

    def check_health(self) -> JobHealth:
        """Take a snapshot and keep the last 100."""
        memory_usage_percent = self._process.memory_percent()
        with self._lock:
            health = JobHealth(
                timestamp=time.time(),
                blocks_done=self.blocks_done,
                blocks_total=self.blocks_total,
                elements_done=self.elements_done,
                memory_usage_percent=memory_usage_percent,
                memory_warning=memory_usage_percent >= self.memory_warning_percent,
            )
            self.history.append(health)
            if len(self.history) > 100:
                self.history = self.history[-100:]
        return health

    def _notify(self, message: str, level: str):
        logger.warning(f"{self.label}: {message}")
        if self.notification_callback is not None:
            try:
                self.notification_callback(message, level)
            except Exception as e:
                logger.error(f"Error in notification callback: {e}")

    def get_status_summary(self) -> Dict[str, object]:
        """Progress figures for display."""
        with self._lock:
            elapsed = time.time() - self.started_at
            return {
                'label': self.label,
                'blocks_done': self.blocks_done,
                'blocks_total': self.blocks_total,
                'elements_done': self.elements_done,
                'elapsed_seconds': round(elapsed, 1),
                'running': self._running,
            }
