"""Experiment harness: run configs, presets and the ``tubal-bench`` command line."""

from .config import RunConfig, dumps, load, loads
from .presets import preset, preset_names

__all__ = ["RunConfig", "dumps", "load", "loads", "preset", "preset_names"]
