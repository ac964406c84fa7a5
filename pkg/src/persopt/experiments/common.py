"""Shared plumbing: run the optimiser from a config and write the standard outputs."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..io import write_json
from ..optimizer import OptState, check_assumptions, init_state, run, write_trace_csv
from ..plotting import plot_diagram, plot_trace
from .config import ExperimentConfig


@dataclass
class ExperimentResult:
    """Optimiser states keyed by run name, scalar metrics and written files."""

    experiment: str
    states: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    arrays: dict = field(default_factory=dict)
    files: list = field(default_factory=list)

    @property
    def state(self) -> OptState:
        return next(iter(self.states.values()))


def optimize(cfg: ExperimentConfig, x0, objective, seed_offset: int = 0, callback=None) -> OptState:
    state = init_state(np.asarray(x0, dtype=np.float64), seed=cfg.seed + seed_offset)
    return run(state, objective, cfg.schedule, cfg.noise, cfg.stop, callback=callback)


def summarize(cfg: ExperimentConfig, state: OptState) -> dict:
    losses = state.losses
    report = check_assumptions(cfg.schedule, cfg.noise, state)
    window = losses[-cfg.stop.loss_window:]
    return {
        "steps": len(losses),
        "stop_reason": state.stop_reason,
        "initial_loss": float(losses[0]),
        "final_loss": float(losses[-1]),
        "window_range": float(window.max() - window.min()),
        "assumption_step_sizes": report.step_sizes,
        "assumption_bounded": report.bounded_iterates,
        "assumption_zero_mean_noise": report.zero_mean_noise,
    }


class Writer:
    """Writes files under ``out`` and records their names; a ``None`` directory writes nothing."""

    def __init__(self, out, result: ExperimentResult):
        self.out = None if out is None else Path(out)
        self.result = result
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)

    def path(self, name):
        self.result.files.append(name)
        return self.out / name

    def __bool__(self):
        return self.out is not None

    def trace(self, state, name="trace.csv", plot="loss.svg"):
        if not self:
            return
        write_trace_csv(state, self.path(name))
        plot_trace(state.losses, self.path(plot))

    def diagram(self, diagram, name, cells=True, title=None):
        if not self:
            return
        write_json(self.path(f"diagram_{name}.json"), diagram.to_json_obj(cells=cells))
        plot_diagram(diagram, self.path(f"diagram_{name}.svg"), title=title or name)

    def summary(self, cfg, metrics):
        if not self:
            return
        write_json(self.path("summary.json"), {"config": cfg.as_dict(), "metrics": metrics})
