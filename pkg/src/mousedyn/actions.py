"""Segmentation of sessions into fixed-length mouse actions and per-action
kinematic sequences (velocity, acceleration, jerk, angles, angular velocity,
curvature) computed by forward differences over the event grid.
"""

from dataclasses import dataclass

import numpy as np

from .events import RawEvent, Session

DEFAULT_BLOCK_LEN = 10

# Degenerate-step clamps: duplicate timestamps and zero-motion steps occur in
# real capture data; clamping keeps every derived quantity finite.
EPS_TIME = 1e-4
EPS_DIST = 1e-9


@dataclass(frozen=True)
class MouseAction:
    """A block of ``block_len`` consecutive events from one subject."""

    subject: int
    events: tuple[RawEvent, ...]
    action_index: int

    def __post_init__(self):
        if len(self.events) < 2:
            raise ValueError("an action needs at least 2 events")
        if any(e.subject != self.subject for e in self.events):
            raise ValueError("action events must share one subject")
        times = [e.timestamp for e in self.events]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("action events must be time-ordered")

    def xy(self) -> np.ndarray:
        """Event coordinates as an (n, 2) array."""
        return np.array([(e.x, e.y) for e in self.events], dtype=float)

    def times(self) -> np.ndarray:
        return np.array([e.timestamp for e in self.events], dtype=float)


@dataclass(frozen=True)
class Kinematics:
    """Per-action kinematic sequences.

    For a block of n events there are n-1 steps, n-2 acceleration values and
    n-3 jerk values; with the default block of 10 the lengths are
    9/9/9/9/9/9/9/8/7/9/8/8 for dt/dx/dy/dist/vx/vy/speed/accel/jerk/angle/
    ang_vel/curvature.
    """

    dt: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    dist: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    speed: np.ndarray
    accel: np.ndarray
    jerk: np.ndarray
    angle: np.ndarray
    ang_vel: np.ndarray
    curvature: np.ndarray

    def sequences(self) -> dict[str, np.ndarray]:
        """The seven sequences that feed summary-statistic features."""
        return {
            "speed": self.speed,
            "vx": self.vx,
            "vy": self.vy,
            "accel": self.accel,
            "jerk": self.jerk,
            "ang_vel": self.ang_vel,
            "curvature": self.curvature,
        }


def segment(session: Session, block_len: int = DEFAULT_BLOCK_LEN) -> list[MouseAction]:
    """Cut a session into consecutive non-overlapping blocks of ``block_len``
    events; a trailing remainder shorter than ``block_len`` is discarded.
    """
    if block_len < 2:
        raise ValueError(f"block_len must be >= 2, got {block_len}")
    n_actions = len(session.events) // block_len
    return [
        MouseAction(
            subject=session.subject,
            events=tuple(session.events[i * block_len:(i + 1) * block_len]),
            action_index=i,
        )
        for i in range(n_actions)
    ]


def wrap_angle(a: np.ndarray | float) -> np.ndarray | float:
    """Map angles to (-pi, pi]; -pi wraps to +pi."""
    return np.pi - np.mod(np.pi - np.asarray(a), 2.0 * np.pi)


def compute_kinematics(action: MouseAction) -> Kinematics:
    """Forward-difference kinematics for one action.

    dt is clamped below by EPS_TIME so duplicate timestamps cannot produce
    infinities; when a step has zero displacement its angle carries forward
    from the previous step (0 at the start of the block).
    """
    xy = action.xy()
    t = action.times()

    dt = np.maximum(np.diff(t), EPS_TIME)
    dx = np.diff(xy[:, 0])
    dy = np.diff(xy[:, 1])
    dist = np.hypot(dx, dy)

    vx = dx / dt
    vy = dy / dt
    speed = dist / dt
    accel = np.diff(speed) / dt[1:]
    jerk = np.diff(accel) / dt[2:]

    angle = np.arctan2(dy, dx)
    carried = 0.0
    for i in range(len(angle)):
        if dist[i] == 0.0:
            angle[i] = carried
        else:
            carried = angle[i]

    d_angle = wrap_angle(np.diff(angle))
    ang_vel = d_angle / dt[1:]
    curvature = d_angle / np.maximum(dist[:-1], EPS_DIST)

    return Kinematics(
        dt=dt, dx=dx, dy=dy, dist=dist, vx=vx, vy=vy, speed=speed,
        accel=accel, jerk=jerk, angle=angle, ang_vel=ang_vel, curvature=curvature,
    )
