"""Peripheral-vision resolution model and field-of-view extension geometry.

Angles are exchanged in degrees throughout; radians appear only inside
trig calls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

DEFAULT_BETA = 2.5


@dataclass(frozen=True)
class FoveationModel:
    """Acuity falloff model: relative resolution halves beta degrees off-axis."""

    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class ResolutionRequirement:
    """Minimum relative resolution r2 at eccentricity theta2, given r1 at theta1."""

    theta1: float
    theta2: float
    r1: float
    r2: float

    def __post_init__(self):
        if not (0 <= self.theta1 <= self.theta2):
            raise DomainError("need 0 <= theta1 <= theta2")
        if not self.r1 > 0:
            raise DomainError("r1 must be positive")
        if not (0 < self.r2 <= self.r1):
            raise DomainError("r2 must lie in (0, r1]")


@dataclass(frozen=True)
class ExtensionGeometry:
    """Similar-triangle relation between an image and its extended version.

    linear_ratio is the original-to-extended side ratio; it must equal
    tan(alpha/2)/tan(alpha_prime/2) for the stored FoVs.
    """

    linear_ratio: float
    alpha: float
    alpha_prime: float

    def __post_init__(self):
        if not (0 < self.alpha <= self.alpha_prime < 180):
            raise DomainError("need 0 < alpha <= alpha_prime < 180")
        if not (0 < self.linear_ratio <= 1):
            raise DomainError("linear_ratio must lie in (0, 1]")
        expect = math.tan(math.radians(self.alpha / 2)) / math.tan(
            math.radians(self.alpha_prime / 2))
        if abs(expect - self.linear_ratio) > 1e-9:
            raise DomainError(
                f"linear_ratio {self.linear_ratio} inconsistent with FoVs "
                f"(expected {expect})")

    @classmethod
    def from_ratio(cls, linear_ratio: float, alpha_prime: float) -> "ExtensionGeometry":
        return cls(linear_ratio, input_fov(linear_ratio, alpha_prime), alpha_prime)

    @classmethod
    def from_fovs(cls, alpha: float, alpha_prime: float) -> "ExtensionGeometry":
        ratio = math.tan(math.radians(alpha / 2)) / math.tan(math.radians(alpha_prime / 2))
        return cls(ratio, alpha, alpha_prime)


@dataclass(frozen=True)
class FoveatedLayout:
    """Angular bands of the two-stage output: center / near / mid periphery.

    Defaults: the computed ~53.13-degree center, 90-degree near band and
    180-degree mid band. Band edges are half-angles of the stored FoVs.
    """

    center_fov: float = field(default_factory=lambda: input_fov(0.5, 90.0))
    near_fov: float = 90.0
    mid_fov: float = 180.0

    def __post_init__(self):
        if not (self.center_fov < self.near_fov < self.mid_fov <= 180):
            raise DomainError("need center_fov < near_fov < mid_fov <= 180")

    @property
    def center_edge(self) -> float:
        return self.center_fov / 2

    @property
    def near_edge(self) -> float:
        return self.near_fov / 2

    @property
    def mid_edge(self) -> float:
        return self.mid_fov / 2

    @property
    def center_ratio(self) -> float:
        """Linear size of the center region relative to the near-band image."""
        return math.tan(math.radians(self.center_edge)) / math.tan(
            math.radians(self.near_edge))


def relative_resolution(model: FoveationModel, theta: float) -> float:
    """Relative resolution beta/(beta+theta) at eccentricity theta (degrees)."""
    if theta < 0:
        raise DomainError(f"eccentricity must be non-negative, got {theta}")
    return model.beta / (model.beta + theta)


def required_resolution(model: FoveationModel, theta1: float, theta2: float,
                        r1: float) -> float:
    """Minimum resolution at theta2 given resolution r1 at theta1 (theta2 >= theta1)."""
    if theta1 < 0 or theta2 < theta1:
        raise DomainError("need 0 <= theta1 <= theta2")
    if not r1 > 0:
        raise DomainError("r1 must be positive")
    return model.beta / (model.beta + theta2 - theta1) * r1


def input_fov(linear_ratio: float, alpha_prime: float) -> float:
    """FoV (degrees) of an image occupying linear_ratio of an alpha_prime-FoV plane."""
    if not (0 < linear_ratio <= 1):
        raise DomainError(f"linear_ratio must lie in (0, 1], got {linear_ratio}")
    if not (0 < alpha_prime < 180):
        raise DomainError(f"alpha_prime must lie in (0, 180), got {alpha_prime}")
    return math.degrees(2 * math.atan(linear_ratio * math.tan(math.radians(alpha_prime / 2))))


# stage-2 output is rendered at quarter resolution; see resolution_profile
MID_BAND_DOWNSCALE = 4


def resolution_profile(model: FoveationModel, layout: FoveatedLayout,
                       r1: float = 1.0, step: float = 1.0) -> list[tuple[float, float, float]]:
    """Sample (theta, required, system) from 0 to the mid-band edge.

    required: the acuity bound anchored at the center-region edge (flat at
    r1 inside it). system: the step function the pipeline delivers, r1 in
    the near band and r1/4 beyond (quarter-resolution mid periphery).
    """
    if not step > 0:
        raise DomainError("step must be positive")
    theta1 = layout.center_edge
    rows = []
    n = int(math.floor(layout.mid_edge / step + 1e-12))
    for i in range(n + 1):
        theta = i * step
        if theta <= theta1:
            req = r1
        else:
            req = required_resolution(model, theta1, theta, r1)
        system = r1 if theta <= layout.near_edge else r1 / MID_BAND_DOWNSCALE
        rows.append((theta, req, system))
    return rows
