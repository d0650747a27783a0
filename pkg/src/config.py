"""Configuration management for coxhess runs."""

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from src.molien import CovariantClass
from src.reference_data import NUMERATOR_SOURCES, reference_row
from src.stabilizer_chain import DEFAULT_BFS_BUDGET, DEFAULT_CHUNK_SIZE

ENUMERATION_MODES = ("chain", "bfs")


@dataclass
class RunConfig:
    """Configuration for one certification run.

    Loads configuration from config.json and environment variables.
    Command-line flags are applied on top by the CLI, followed by validate().
    """

    # Command
    command: str = "certify"
    groups: list = field(default_factory=list)
    v_override: Optional[list] = None

    # Certification Parameters
    numerator_source: str = "computed"
    truncation_order: int = 64
    degree_truncation_order: int = 140
    covariant_class: str = "sym2"

    # Enumeration Parameters
    workers: int = 1
    partitions: int = 0  # 0 means "same as workers"
    enumeration_mode: str = "chain"
    long_mode: bool = False
    bfs_budget: int = DEFAULT_BFS_BUDGET
    long_order_threshold: int = 10_000_000
    chunk_size: int = DEFAULT_CHUNK_SIZE

    # Output
    cache_dir: str = ".coxhess_cache"
    output_path: Optional[str] = None
    log_dir: str = "logs"

    # Monitoring
    memory_warning_percent: float = 80.0
    monitor_interval_seconds: int = 30

    # Applied defaults tracking
    _applied_defaults: list = field(default_factory=list, init=False, repr=False)

    @classmethod
    def load_from_file(cls, config_path: str = "config/config.json") -> "RunConfig":
        """Load configuration from JSON file and environment variables.

        Args:
            config_path: Path to the configuration JSON file

        Returns:
            RunConfig instance with loaded and validated configuration

        Raises:
            ValueError: If configuration is invalid
        """
        config = cls()

        if os.path.exists(config_path):
            with open(config_path, 'r', encoding='utf-8') as f:
                config_data = json.load(f)
                config._load_from_dict(config_data)
        else:
            config._applied_defaults.append("No config file found, using all defaults")

        # Environment variables take priority over the file
        config._load_from_env()

        config.validate()

        return config

    def _load_from_dict(self, config_data: dict) -> None:
        """Load configuration from dictionary."""
        self._load_str_param(config_data, "numerator_source")
        self._load_int_param(config_data, "truncation_order")
        self._load_int_param(config_data, "degree_truncation_order")
        self._load_str_param(config_data, "covariant_class")

        self._load_int_param(config_data, "workers")
        self._load_int_param(config_data, "partitions")
        self._load_str_param(config_data, "enumeration_mode")
        self._load_bool_param(config_data, "long_mode")
        self._load_int_param(config_data, "bfs_budget")
        self._load_int_param(config_data, "long_order_threshold")
        self._load_int_param(config_data, "chunk_size")

        self._load_str_param(config_data, "cache_dir")
        self._load_str_param(config_data, "log_dir")
        if "output_path" in config_data:
            self.output_path = config_data["output_path"]

        self._load_float_param(config_data, "memory_warning_percent")
        self._load_int_param(config_data, "monitor_interval_seconds")

        if "groups" in config_data:
            self.groups = [str(g) for g in config_data["groups"]]
        if "v" in config_data:
            self.v_override = self.parse_point(config_data["v"])

    def _load_bool_param(self, config_data: dict, param_name: str) -> None:
        """Load a boolean parameter from config data."""
        if param_name in config_data:
            setattr(self, param_name, bool(config_data[param_name]))
        else:
            default_value = getattr(self, param_name)
            self._applied_defaults.append(f"{param_name} (default: {default_value})")

    def _load_int_param(self, config_data: dict, param_name: str) -> None:
        """Load an integer parameter from config data."""
        if param_name in config_data:
            setattr(self, param_name, int(config_data[param_name]))
        else:
            default_value = getattr(self, param_name)
            self._applied_defaults.append(f"{param_name} (default: {default_value})")

    def _load_float_param(self, config_data: dict, param_name: str) -> None:
        """Load a float parameter from config data."""
        if param_name in config_data:
            setattr(self, param_name, float(config_data[param_name]))
        else:
            default_value = getattr(self, param_name)
            self._applied_defaults.append(f"{param_name} (default: {default_value})")

    def _load_str_param(self, config_data: dict, param_name: str) -> None:
        """Load a string parameter from config data."""
        if param_name in config_data:
            setattr(self, param_name, str(config_data[param_name]))
        else:
            default_value = getattr(self, param_name)
            self._applied_defaults.append(f"{param_name} (default: {default_value})")

    def _load_from_env(self) -> None:
        """Load configuration from environment variables (overrides file config)."""
        if os.getenv("COXHESS_CACHE_DIR"):
            self.cache_dir = os.getenv("COXHESS_CACHE_DIR")

        if os.getenv("COXHESS_THREADS"):
            try:
                self.workers = int(os.getenv("COXHESS_THREADS"))
            except ValueError:
                raise ValueError(f"COXHESS_THREADS must be an integer, got {os.getenv('COXHESS_THREADS')!r}")

        if os.getenv("COXHESS_LOG_DIR"):
            self.log_dir = os.getenv("COXHESS_LOG_DIR")

        if os.getenv("COXHESS_NUMERATOR"):
            self.numerator_source = os.getenv("COXHESS_NUMERATOR")

    @staticmethod
    def parse_point(value) -> List[Fraction]:
        """Accept "1,2,3", "1/2,-3" or a JSON list of numbers / fraction strings."""
        if isinstance(value, str):
            parts = [p for p in value.replace(" ", "").split(",") if p]
        else:
            parts = list(value)
        if not parts:
            raise ValueError("point must have at least one coordinate")
        try:
            return [Fraction(str(p)) for p in parts]
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"Invalid point {value!r}; expected comma-separated rationals")

    @property
    def effective_partitions(self) -> int:
        return self.partitions if self.partitions > 0 else self.workers

    def validate(self) -> None:
        """Validate all configuration parameters.

        Raises:
            ValueError: If any configuration parameter is invalid
        """
        errors = []

        if self.workers < 1:
            errors.append(f"Invalid workers {self.workers}. Must be at least 1")

        if self.partitions < 0:
            errors.append(f"Invalid partitions {self.partitions}. Must be at least 1 (or 0 for one per worker)")

        if self.truncation_order < 2:
            errors.append(f"Invalid truncation_order {self.truncation_order}. Must be at least 2")

        if self.degree_truncation_order < self.truncation_order:
            errors.append(
                f"Invalid degree_truncation_order {self.degree_truncation_order}. "
                f"Must be at least truncation_order ({self.truncation_order})")

        if self.numerator_source not in NUMERATOR_SOURCES:
            errors.append(
                f"Invalid numerator_source '{self.numerator_source}'. "
                f"Must be one of: {', '.join(NUMERATOR_SOURCES)}")

        valid_classes = [c.value for c in CovariantClass]
        if self.covariant_class not in valid_classes:
            errors.append(
                f"Invalid covariant_class '{self.covariant_class}'. Must be one of: {', '.join(valid_classes)}")

        if self.enumeration_mode not in ENUMERATION_MODES:
            errors.append(
                f"Invalid enumeration_mode '{self.enumeration_mode}'. Must be one of: {', '.join(ENUMERATION_MODES)}")

        if self.bfs_budget < 1:
            errors.append(f"Invalid bfs_budget {self.bfs_budget}. Must be at least 1")

        if self.long_order_threshold < 1:
            errors.append(f"Invalid long_order_threshold {self.long_order_threshold}. Must be at least 1")

        if self.chunk_size < 1:
            errors.append(f"Invalid chunk_size {self.chunk_size}. Must be at least 1")

        if self.memory_warning_percent <= 0 or self.memory_warning_percent > 100:
            errors.append(
                f"Invalid memory_warning_percent {self.memory_warning_percent}. Must be in (0, 100]")

        if self.monitor_interval_seconds < 1:
            errors.append(f"Invalid monitor_interval_seconds {self.monitor_interval_seconds}. Must be at least 1")

        if errors:
            error_message = "Configuration validation failed:\n" + "\n".join(f"  - {error}" for error in errors)
            raise ValueError(error_message)

    def validate_for_group(self, label: str) -> None:
        """Check the truncation order against the group's reference numerator.

        Raises:
            ValueError: If the truncation cannot hold the numerator
        """
        row = reference_row(label)
        if row is None:
            return
        needed = 2 + len(row.sym2_numerator) - 1
        if self.truncation_order < needed:
            raise ValueError(
                f"Invalid truncation_order {self.truncation_order} for {row.label}. "
                f"Must be at least {needed} (2 + numerator degree)")

    def max_order(self) -> Optional[int]:
        """Order limit for enumeration; None in long mode."""
        return None if self.long_mode else self.long_order_threshold

    def get_applied_defaults(self) -> list:
        """Get list of configuration parameters that used default values.

        Returns:
            List of parameter names that used defaults
        """
        return self._applied_defaults.copy()
