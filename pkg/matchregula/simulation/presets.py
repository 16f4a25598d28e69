"""
Packaged reproduction presets.
"""

import logging
from importlib import resources
from typing import Any, Optional

import yaml

from ..core.config import ExperimentConfig
from ..core.errors import ConfigError

logger = logging.getLogger(__name__)

SCALES = ("desk", "full")


def load_presets() -> dict[str, dict[str, Any]]:
    text = resources.files(__package__).joinpath("presets.yaml").read_text(encoding="utf-8")
    return yaml.safe_load(text)


def available_presets() -> list[str]:
    return list(load_presets())


def preset_configs(preset_id: str, scale: str = "desk",
                   seed: Optional[int] = None) -> list[ExperimentConfig]:
    """Resolved experiment configs for one preset.

    Args:
        preset_id: preset name (see :func:`available_presets`)
        scale: ``desk`` (minutes) or ``full`` (full replication counts)
        seed: replaces every run's master seed when given

    Raises:
        ConfigError: unknown preset or scale
    """
    presets = load_presets()
    if preset_id not in presets:
        raise ConfigError(
            f"unknown reproduction id '{preset_id}'; known ids: {', '.join(presets)}"
        )
    if scale not in SCALES:
        raise ConfigError(f"unknown scale '{scale}'; expected one of {', '.join(SCALES)}")

    configs = []
    for run in presets[preset_id]["runs"]:
        document = {k: v for k, v in run.items() if k != "scales"}
        document.update(run["scales"][scale])
        if seed is not None:
            document["seed"] = seed
        document.setdefault(
            "outputs",
            {"report": f"{run['name']}_report.json", "plot_csv": f"{run['name']}_plot.csv"},
        )
        configs.append(ExperimentConfig.from_dict(document))
    logger.debug(f"Resolved preset '{preset_id}' at {scale} scale: {len(configs)} run(s)")
    return configs
