"""Desk-scale experiments driven by flat key-value configs."""
from .circle import run_circle_match
from .common import ExperimentResult
from .config import ConfigError, ExperimentConfig, load_config, make_config, parse_config
from .filter_select import run_filter_select
from .image import run_image
from .pointcloud import run_pointcloud
from .regression import run_regression

EXPERIMENTS = {
    "pointcloud": run_pointcloud,
    "image": run_image,
    "regression": run_regression,
    "circle-match": run_circle_match,
    "filter-select": run_filter_select,
}

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "load_config",
    "make_config",
    "parse_config",
    "run_circle_match",
    "run_filter_select",
    "run_image",
    "run_pointcloud",
    "run_regression",
]
