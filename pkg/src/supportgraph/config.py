"""Engine configuration: one flat document, overridable per CLI flag."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class AlignmentConfig:
    """Knobs for the Manhattan-triad search."""

    normal_weight: float = 1.0        # weight of the surface-normal score
    line_weight: float = 1.0          # weight of the line-direction score
    sigma: float = 0.25               # kernel bandwidth
    near_y_threshold_deg: float = 15.0
    sweep_step_deg: float = 1.0       # in-plane sampling resolution
    surface_cone_deg: float = 30.0    # horizontal/vertical pixel classification cone

    def __post_init__(self):
        if self.normal_weight < 0 or self.line_weight < 0:
            raise ValueError("score weights must be >= 0")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")


@dataclass(frozen=True)
class EnergyWeights:
    """Weights of the physical-constraint terms plus the hidden-support cost."""

    alpha_class: float = 1.0
    alpha_dist: float = 1.0
    alpha_spc: float = 1.0
    k_hidden: float = 5.0

    def __post_init__(self):
        for name in ("alpha_class", "alpha_dist", "alpha_spc", "k_hidden"):
            v = getattr(self, name)
            if not (v >= 0 and v < float("inf")):
                raise ValueError(f"{name} must be finite and >= 0")


@dataclass(frozen=True)
class EngineConfig:
    nms_weight: float = 1.0
    nms_iou_threshold: float = 0.5
    segmentation_ratio: float = 0.8
    proximity_min_gap: float = 0.5    # metres; pairs closer than max(this, half
                                      # the smaller box diagonal) get position edges
    alignment: AlignmentConfig = field(default_factory=AlignmentConfig)
    energy: EnergyWeights = field(default_factory=EnergyWeights)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config(path: str | Path | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    doc = json.loads(Path(path).read_text())
    try:
        alignment = AlignmentConfig(**doc.pop("alignment", {}))
        energy = EnergyWeights(**doc.pop("energy", {}))
        return EngineConfig(alignment=alignment, energy=energy, **doc)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad config {path}: {exc}") from exc
