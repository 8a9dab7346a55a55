"""Raw mouse-event ingestion and synthetic session generation.

Input files are line-delimited text, one event per row, with four columns:
UNIX timestamp (seconds, fractional allowed), pointer x and y in pixels,
and an integer subject id. The default layout is a ``timestamp,x,y,subject``
header followed by comma-separated rows; both the header and the column
positions can be overridden.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import ConfigError, DataError, ParseError

FIELD_NAMES = ("timestamp", "x", "y", "subject")
DEFAULT_COLUMN_MAP = {"timestamp": 0, "x": 1, "y": 2, "subject": 3}


@dataclass(frozen=True)
class RawEvent:
    """One mouse event: when it happened, where the pointer was, and whose."""

    timestamp: float
    x: float
    y: float
    subject: int

    def __post_init__(self):
        if not (math.isfinite(self.timestamp) and self.timestamp >= 0):
            raise ValueError(f"timestamp must be finite and >= 0, got {self.timestamp}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Session:
    """All events recorded for one subject, sorted by timestamp."""

    subject: int
    events: tuple[RawEvent, ...]

    def __post_init__(self):
        for e in self.events:
            if e.subject != self.subject:
                raise ValueError(f"event subject {e.subject} != session subject {self.subject}")
        times = [e.timestamp for e in self.events]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("session events must be sorted by timestamp")

    def __len__(self) -> int:
        return len(self.events)


def _normalize_lines(text: str | Iterable[str]) -> Iterator[str]:
    if isinstance(text, str):
        return iter(text.splitlines())
    return iter(text)


def _resolve_header(first_row: list[str], column_map: Mapping[str, int] | None):
    """Decide whether the first row is a header and resolve the column map.

    Returns (map, header_consumed). An explicit column_map always wins; a
    header row is still skipped if present.
    """
    tokens = [t.strip().lower() for t in first_row]
    is_header = set(FIELD_NAMES) <= set(tokens)
    if column_map is not None:
        missing = [name for name in FIELD_NAMES if name not in column_map]
        if missing:
            raise ConfigError(f"column_map missing fields: {', '.join(missing)}")
        return dict(column_map), is_header
    if is_header:
        return {name: tokens.index(name) for name in FIELD_NAMES}, True
    return dict(DEFAULT_COLUMN_MAP), False


def _parse_row(parts: list[str], cmap: Mapping[str, int], line_no: int) -> RawEvent:
    try:
        values = {name: parts[cmap[name]] for name in FIELD_NAMES}
    except IndexError:
        raise ParseError(line_no, f"expected at least {max(cmap.values()) + 1} columns, got {len(parts)}")
    try:
        return RawEvent(
            timestamp=float(values["timestamp"]),
            x=float(values["x"]),
            y=float(values["y"]),
            subject=int(values["subject"]),
        )
    except ValueError as exc:
        raise ParseError(line_no, str(exc))


def parse_events(
    text: str | Iterable[str],
    column_map: Mapping[str, int] | None = None,
    *,
    delimiter: str = ",",
    strict: bool = True,
    rejected: list[tuple[int, str]] | None = None,
) -> list[Session]:
    """Parse delimited event rows into per-subject sessions.

    ``text`` is a string or an iterable of lines. In strict mode (default) a
    malformed row raises :class:`ParseError` naming its 1-based line number;
    in lenient mode bad rows are skipped and appended to ``rejected`` when a
    list is supplied. Within each session events are sorted by timestamp;
    ties keep file order. Sessions are returned sorted by subject id.
    """
    by_subject: dict[int, list[RawEvent]] = {}
    cmap = None
    for line_no, raw_line in enumerate(_normalize_lines(text), start=1):
        line = raw_line.strip()
        if not line:
            continue
        parts = line.split(delimiter)
        if cmap is None:
            cmap, consumed = _resolve_header(parts, column_map)
            if consumed:
                continue
        try:
            event = _parse_row(parts, cmap, line_no)
        except ParseError:
            if strict:
                raise
            if rejected is not None:
                rejected.append((line_no, raw_line))
            continue
        by_subject.setdefault(event.subject, []).append(event)

    sessions = []
    for subject in sorted(by_subject):
        ordered = sorted(by_subject[subject], key=lambda e: e.timestamp)  # stable: ties keep file order
        sessions.append(Session(subject=subject, events=tuple(ordered)))
    return sessions


def iter_events(
    text: str | Iterable[str],
    column_map: Mapping[str, int] | None = None,
    *,
    delimiter: str = ",",
) -> Iterator[RawEvent]:
    """Yield events one by one in file order, without grouping by subject.

    Same format rules as :func:`parse_events` (header detection, strict
    parsing); used by the streaming authenticator, which must preserve
    arrival order.
    """
    cmap = None
    for line_no, raw_line in enumerate(_normalize_lines(text), start=1):
        line = raw_line.strip()
        if not line:
            continue
        parts = line.split(delimiter)
        if cmap is None:
            cmap, consumed = _resolve_header(parts, column_map)
            if consumed:
                continue
        yield _parse_row(parts, cmap, line_no)


def serialize_sessions(sessions: Iterable[Session], *, header: bool = True) -> Iterator[str]:
    """Yield event lines in the default format; exact float round trip via repr."""
    if header:
        yield ",".join(FIELD_NAMES)
    for session in sessions:
        for e in session.events:
            # float() first: numpy scalar reprs would not parse back
            yield f"{float(e.timestamp)!r},{float(e.x)!r},{float(e.y)!r},{int(e.subject)}"


@dataclass(frozen=True)
class SyntheticProfile:
    """Per-user kinematic parameters for the synthetic session generator.

    ``mean_speed`` is px/s, ``speed_jitter`` its per-step standard deviation,
    ``turn_std`` the per-step heading-change std in radians. The pointer
    reflects off the ``bounds`` box so coordinates stay screen-like.
    """

    subject: int
    mean_speed: float
    speed_jitter: float = 0.0
    turn_std: float = 0.3
    dt_mean: float = 0.008
    dt_jitter: float = 0.0
    start: tuple[float, float] = (960.0, 540.0)
    bounds: tuple[float, float] = (1920.0, 1080.0)
    origin: tuple[float, float] = (0.0, 0.0)
    heading: float = 0.0

    def __post_init__(self):
        if self.dt_mean <= 0:
            raise ConfigError(f"dt_mean must be positive, got {self.dt_mean}")
        for name in ("speed_jitter", "turn_std", "dt_jitter"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        ox, oy = self.origin
        if not (ox <= self.start[0] <= ox + self.bounds[0]
                and oy <= self.start[1] <= oy + self.bounds[1]):
            raise ConfigError("start must lie inside the origin + bounds box")


def synthesize_session(profile: SyntheticProfile, seed: int, n_events: int) -> Session:
    """Generate a deterministic session from a kinematic profile.

    A heading random walk with per-step speed and inter-event-time draws;
    pure function of (profile, seed, n_events). Draw order is fixed:
    headings, then speeds, then dts.
    """
    if n_events < 1:
        raise DataError(f"n_events must be >= 1, got {n_events}")
    rng = np.random.default_rng(seed)
    n_steps = n_events - 1
    # unit normals scaled by the std: zero jitter reproduces the mean exactly
    headings = profile.heading + np.cumsum(rng.normal(size=n_steps) * profile.turn_std)
    speeds = np.maximum(profile.mean_speed + rng.normal(size=n_steps) * profile.speed_jitter, 0.0)
    dts = profile.dt_mean + rng.normal(size=n_steps) * profile.dt_jitter
    dts = np.maximum(dts, profile.dt_mean * 1e-3)  # timestamps must strictly increase

    width, height = profile.bounds
    ox, oy = profile.origin
    x, y = float(profile.start[0]), float(profile.start[1])
    t = 0.0
    events = [RawEvent(t, x, y, profile.subject)]
    for i in range(n_steps):
        x += float(speeds[i] * dts[i]) * math.cos(headings[i])
        y += float(speeds[i] * dts[i]) * math.sin(headings[i])
        # reflect off the profile's screen box
        while not (ox <= x <= ox + width and oy <= y <= oy + height):
            if x < ox:
                x = 2.0 * ox - x
            elif x > ox + width:
                x = 2.0 * (ox + width) - x
            if y < oy:
                y = 2.0 * oy - y
            elif y > oy + height:
                y = 2.0 * (oy + height) - y
        t += float(dts[i])
        events.append(RawEvent(t, x, y, profile.subject))
    return Session(subject=profile.subject, events=tuple(events))
