"""3-D placements, random-waypoint motion and Doppler bookkeeping.

Mobile users roam a small axis-aligned square at fixed height: targets are
drawn uniformly inside the square and the user advances toward the current
target at constant speed, one step per simulated second.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 2.998e8  # m/s


def position(x: float, y: float, z: float) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


def distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance between two points, in meters."""
    return float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))


@dataclass(frozen=True)
class SquareBounds:
    """Axis-aligned square in the xy-plane; motion keeps z fixed."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @classmethod
    def centered(cls, center: np.ndarray, side: float) -> "SquareBounds":
        h = side / 2.0
        return cls(center[0] - h, center[0] + h, center[1] - h, center[1] + h)

    def contains(self, p: np.ndarray, tol: float = 1e-9) -> bool:
        return (
            self.x_min - tol <= p[0] <= self.x_max + tol
            and self.y_min - tol <= p[1] <= self.y_max + tol
        )

    def sample(self, rng: np.random.Generator, z: float) -> np.ndarray:
        x = rng.uniform(self.x_min, self.x_max)
        y = rng.uniform(self.y_min, self.y_max)
        return position(x, y, z)


@dataclass
class WaypointState:
    current: np.ndarray
    target: np.ndarray
    speed: float  # meters per time step
    bounds: SquareBounds


def make_waypoint_state(
    start: np.ndarray, bounds: SquareBounds, speed: float, rng: np.random.Generator
) -> WaypointState:
    if speed <= 0:
        raise ValueError("speed must be positive")
    target = bounds.sample(rng, z=start[2])
    return WaypointState(np.asarray(start, float).copy(), target, speed, bounds)


def rwp_step(state: WaypointState, rng: np.random.Generator) -> WaypointState:
    """Advance one random-waypoint step.

    Moves exactly `speed` meters toward the target, or lands on the target
    when it is closer than that and immediately draws a fresh uniform target.
    """
    remaining = distance(state.current, state.target)
    if remaining <= state.speed:
        new_current = state.target.copy()
        new_target = state.bounds.sample(rng, z=state.current[2])
    else:
        step = (state.target - state.current) * (state.speed / remaining)
        new_current = state.current + step
        new_target = state.target.copy()
    return WaypointState(new_current, new_target, state.speed, state.bounds)


def radial_speed(prev: np.ndarray, curr: np.ndarray, anchor: np.ndarray) -> float:
    """Signed radial speed toward `anchor` over one time step.

    Positive when the mover got closer to the anchor.
    """
    return distance(prev, anchor) - distance(curr, anchor)


def doppler_shift(v_radial: float, f_c: float) -> float:
    """Narrowband Doppler shift in Hz for radial speed in m/s."""
    return f_c * v_radial / SPEED_OF_LIGHT
