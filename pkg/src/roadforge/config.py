from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .curvature import DEFAULT_Q, METHODS
from .segmentation import DEFAULT_STRAIGHT_DELTA, DEFAULT_VOTE_W

PROJECTIONS = ("none", "local-tangent-plane")


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable that affects the fitted model, in one record."""

    q: int = DEFAULT_Q
    method: str = "independent-coordinates"
    vote_w: int = DEFAULT_VOTE_W
    straight_delta: float = DEFAULT_STRAIGHT_DELTA
    error_bound: float = 2.0
    half_width: float = 3.5
    sample_step: float = 1.0
    projection: str = "none"

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.vote_w < 3 or self.vote_w % 2 == 0:
            raise ValueError(f"vote_w must be odd and >= 3, got {self.vote_w}")
        for name in ("straight_delta", "error_bound", "half_width", "sample_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.projection not in PROJECTIONS:
            raise ValueError(f"unknown projection {self.projection!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> PipelineConfig:
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})
