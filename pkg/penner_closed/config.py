"""
Configuration management for penner_closed.
"""

import math
import os
from typing import Any, Dict, List

import yaml


class Config:
    """Configuration loader and validator."""

    def __init__(self, config_dict: Dict[str, Any]):
        """Initialize configuration from dictionary."""
        self.raw = config_dict

        self.numerics = NumericsConfig(config_dict.get("numerics", {}))
        self.lifting = LiftingConfig(config_dict.get("lifting", {}))
        self.sampler = SamplerConfig(config_dict.get("sampler", {}))
        self.verify = VerifyConfig(config_dict.get("verify", {}))
        self.logging = LoggingConfig(config_dict.get("logging", {}))

    @staticmethod
    def load(config_path: str) -> 'Config':
        """
        Load configuration from YAML file.

        Args:
            config_path: Path to YAML configuration file

        Returns:
            Config object

        Raises:
            FileNotFoundError: If config file doesn't exist
            yaml.YAMLError: If config file is invalid YAML
        """
        config_path = os.path.expanduser(config_path)

        if not os.path.exists(config_path):
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(config_path, 'r') as f:
            config_dict = yaml.safe_load(f)

        if not config_dict:
            raise ValueError(f"Configuration file is empty: {config_path}")

        return Config(config_dict)

    @staticmethod
    def default() -> 'Config':
        """All-defaults configuration."""
        return Config({})

    def validate(self) -> List[str]:
        """
        Validate configuration and return list of errors.

        Returns:
            List of error messages (empty if valid)
        """
        errors = []

        for name in ("det_tolerance", "factor_tolerance", "projective_tolerance",
                     "hyperbolic_tolerance", "loop_tolerance", "psi_tolerance"):
            if getattr(self.numerics, name) <= 0:
                errors.append(f"numerics.{name} must be positive")

        if self.lifting.initial_steps < 1:
            errors.append("lifting.initial_steps must be at least 1")

        if not 0 < self.lifting.max_step_angle < math.pi / 2:
            errors.append("lifting.max_step_angle must lie in (0, pi/2)")

        if not 0 < self.lifting.residual_gate < 0.5:
            errors.append("lifting.residual_gate must lie in (0, 0.5)")

        if not self.lifting.start_angles:
            errors.append("lifting.start_angles must not be empty")

        if self.sampler.retry_budget < 1:
            errors.append("sampler.retry_budget must be at least 1")

        if not 0 < self.sampler.low < self.sampler.high:
            errors.append("sampler range must satisfy 0 < low < high")

        if self.verify.genus < 2:
            errors.append("verify.genus must be at least 2")

        if self.verify.samples < 1:
            errors.append("verify.samples must be at least 1")

        if self.verify.workers < 1:
            errors.append("verify.workers must be at least 1")

        return errors


class NumericsConfig:
    """Float-backend tolerances."""

    def __init__(self, config: Dict[str, Any]):
        self.det_tolerance = config.get("det_tolerance", 1e-12)
        self.factor_tolerance = config.get("factor_tolerance", 1e-12)
        self.projective_tolerance = config.get("projective_tolerance", 1e-9)
        self.hyperbolic_tolerance = config.get("hyperbolic_tolerance", 1e-9)
        self.loop_tolerance = config.get("loop_tolerance", 1e-9)
        self.psi_tolerance = config.get("psi_tolerance", 1e-10)


class LiftingConfig:
    """Angle-tracking settings for winding numbers."""

    def __init__(self, config: Dict[str, Any]):
        self.initial_steps = config.get("initial_steps", 16)
        self.max_step_angle = config.get("max_step_angle", math.pi / 4)
        self.max_depth = config.get("max_depth", 30)
        self.residual_gate = config.get("residual_gate", 0.01)
        self.start_angles = list(config.get("start_angles", [0.3, 1.1, 2.2]))


class SamplerConfig:
    """Chart-point sampler settings."""

    def __init__(self, config: Dict[str, Any]):
        self.retry_budget = config.get("retry_budget", 50)
        self.low = config.get("low", 0.5)
        self.high = config.get("high", 2.0)


class VerifyConfig:
    """Defaults for verification suites."""

    def __init__(self, config: Dict[str, Any]):
        self.genus = config.get("genus", 2)
        self.seed = config.get("seed", 7)
        self.samples = config.get("samples", 100)
        self.workers = config.get("workers", 4)


class LoggingConfig:
    """Logging configuration."""

    def __init__(self, config: Dict[str, Any]):
        self.level = config.get("level", "INFO")
        self.file = config.get("file", "")
        self.max_size_mb = config.get("max_size_mb", 100)
        self.backup_count = config.get("backup_count", 5)
        self.format = config.get("format", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")
