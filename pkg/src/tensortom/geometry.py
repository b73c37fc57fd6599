"""Unit-disk geometry: boundary parametrization, chords and ray classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
TANGENT_TOL = 1e-12


class GeometryError(ValueError):
    """Raised when a point lies outside the closed unit disk."""


class RayClass(enum.Enum):
    INCOMING = "incoming"
    OUTGOING = "outgoing"
    TANGENT = "tangent"


@dataclass(frozen=True)
class Direction:
    """Unit direction theta = (cos phi, sin phi)."""

    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)

    @property
    def theta(self) -> np.ndarray:
        return np.array([math.cos(self.phi), math.sin(self.phi)])

    @property
    def theta_perp(self) -> np.ndarray:
        # counter-clockwise rotation by pi/2
        return np.array([-math.sin(self.phi), math.cos(self.phi)])


@dataclass(frozen=True)
class BoundaryPoint:
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", float(self.beta) % TWO_PI)

    @property
    def position(self) -> np.ndarray:
        return np.array([math.cos(self.beta), math.sin(self.beta)])

    @property
    def normal(self) -> np.ndarray:
        return self.position

    @property
    def complex(self) -> complex:
        return complex(math.cos(self.beta), math.sin(self.beta))


@dataclass(frozen=True)
class Chord:
    """Chord through ``x`` in ``direction`` with endpoints x -/+ tau_-/+ theta."""

    x: tuple
    direction: Direction
    tau_minus: float
    tau_plus: float

    @property
    def length(self) -> float:
        return self.tau_minus + self.tau_plus

    @property
    def exit_point(self) -> np.ndarray:
        return np.asarray(self.x) + self.tau_plus * self.direction.theta

    @property
    def entry_point(self) -> np.ndarray:
        return np.asarray(self.x) - self.tau_minus * self.direction.theta


def boundary_point(beta: float) -> BoundaryPoint:
    return BoundaryPoint(beta)


def travel_times_array(x1, x2, c, s):
    """Vectorized distances to the unit circle along -theta and +theta.

    ``c, s`` are cos(phi), sin(phi). Points must lie in the closed disk;
    tiny negative discriminants from rounding are clipped.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    p = x1 * c + x2 * s
    q = x1 * x1 + x2 * x2 - 1.0
    disc = np.sqrt(np.maximum(p * p - q, 0.0))
    # |x + t theta|^2 = 1  ->  t^2 + 2pt + q = 0
    tau_plus = np.maximum(disc - p, 0.0)
    tau_minus = np.maximum(disc + p, 0.0)
    return tau_minus, tau_plus


def travel_times(x, d: Direction) -> tuple[float, float]:
    """Return (tau_minus, tau_plus) for the chord through ``x`` along ``d``."""
    x1, x2 = float(x[0]), float(x[1])
    if x1 * x1 + x2 * x2 > 1.0 + 1e-12:
        raise GeometryError(f"point {x!r} lies outside the closed unit disk")
    tm, tp = travel_times_array(x1, x2, math.cos(d.phi), math.sin(d.phi))
    return float(tm), float(tp)


def chord(x, d: Direction) -> Chord:
    tm, tp = travel_times(x, d)
    return Chord(tuple(float(v) for v in x), d, tm, tp)


def classify(zeta: BoundaryPoint, d: Direction) -> RayClass:
    dot = float(np.dot(zeta.normal, d.theta))
    if abs(dot) < TANGENT_TOL:
        return RayClass.TANGENT
    return RayClass.OUTGOING if dot > 0 else RayClass.INCOMING


def outgoing_mask(beta, phi) -> np.ndarray:
    """Boolean mask of strictly outgoing pairs, broadcasting ``beta`` against ``phi``."""
    beta = np.asarray(beta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    dot = np.cos(beta) * np.cos(phi) + np.sin(beta) * np.sin(phi)
    return dot >= TANGENT_TOL
