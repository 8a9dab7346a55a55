"""Streaming trust policy: an EWMA over per-action genuine scores.

Each completed action is scored by a binary model; the trust value follows
trust <- (1 - lambda) * trust + lambda * score. Trust below the threshold
for M consecutive updates raises an alarm. The policy is an online extension
of the offline pipeline: the defaults (start 0.7, lambda 0.2, threshold 0.5,
M 3) tolerate isolated misclassifications while alarming within a few
actions of a takeover.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ConfigError, DataError
from .events import RawEvent

STATUS_OK = "ok"
STATUS_SUSPECT = "suspect"
STATUS_ALARM = "alarm"


@dataclass(frozen=True)
class TrustPolicy:
    initial_trust: float = 0.7
    smoothing: float = 0.2       # EWMA weight on the newest score
    threshold: float = 0.5       # trust below this counts as a low update
    consecutive_limit: int = 3   # lows in a row required to alarm

    def __post_init__(self):
        if not 0.0 <= self.initial_trust <= 1.0:
            raise ConfigError(f"initial_trust must be in [0, 1], got {self.initial_trust}")
        if not 0.0 < self.smoothing <= 1.0:
            raise ConfigError(f"smoothing must be in (0, 1], got {self.smoothing}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.consecutive_limit < 1:
            raise ConfigError(f"consecutive_limit must be >= 1, got {self.consecutive_limit}")


@dataclass(frozen=True)
class TrustUpdate:
    index: int       # 0-based action index within the stream
    score: float
    trust: float
    low_run: int     # consecutive low-trust updates, capped at the limit
    status: str


@dataclass(frozen=True)
class StreamSummary:
    n_events: int
    n_actions: int
    n_alarms: int
    discarded_events: int   # trailing partial block
    final_trust: float
    final_status: str


class TrustMonitor:
    """Mutable EWMA state, fed one score per completed action."""

    def __init__(self, policy: TrustPolicy | None = None):
        self.policy = policy or TrustPolicy()
        self.trust = self.policy.initial_trust
        self.low_run = 0
        self.n_updates = 0

    @property
    def status(self) -> str:
        if self.low_run >= self.policy.consecutive_limit:
            return STATUS_ALARM
        return STATUS_SUSPECT if self.low_run > 0 else STATUS_OK

    def update(self, score: float) -> TrustUpdate:
        score = float(score)
        if not 0.0 <= score <= 1.0:
            raise DataError(f"scores must lie in [0, 1], got {score}")
        p = self.policy
        self.trust = (1.0 - p.smoothing) * self.trust + p.smoothing * score
        if self.trust < p.threshold:
            self.low_run = min(self.low_run + 1, p.consecutive_limit)
        else:
            self.low_run = 0
        index = self.n_updates
        self.n_updates += 1
        return TrustUpdate(index, score, self.trust, self.low_run, self.status)


def stream_authenticate(scores: Iterable[float],
                        policy: TrustPolicy | None = None) -> Iterator[TrustUpdate]:
    """Run the trust recurrence over a score sequence, yielding each update."""
    monitor = TrustMonitor(policy)
    for score in scores:
        yield monitor.update(score)


class BlockBuffer:
    """Stateful fixed-length chunker for event streams.

    Block alignment carries across feed() calls, so streaming several files
    through one buffer equals streaming their concatenation.
    """

    def __init__(self, block_len: int):
        if block_len < 2:
            raise ConfigError(f"block_len must be >= 2, got {block_len}")
        self.block_len = block_len
        self._buffer: list[RawEvent] = []

    def feed(self, events: Iterable[RawEvent]) -> Iterator[tuple[RawEvent, ...]]:
        for event in events:
            self._buffer.append(event)
            if len(self._buffer) == self.block_len:
                yield tuple(self._buffer)
                self._buffer.clear()

    @property
    def pending(self) -> int:
        """Events held in the current incomplete block."""
        return len(self._buffer)
