"""EWMA trust policy and the streaming block buffer.

The trajectory tests recompute the recurrence trust <- (1-lambda)*trust +
lambda*score with the same float expression, so equality assertions are
exact; decimal spot checks use approx on top of that.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mousedyn.errors import ConfigError, DataError
from mousedyn.events import RawEvent
from mousedyn.streaming import (
    STATUS_ALARM,
    STATUS_OK,
    STATUS_SUSPECT,
    BlockBuffer,
    StreamSummary,
    TrustMonitor,
    TrustPolicy,
    TrustUpdate,
    stream_authenticate,
)


def recurrence(scores, policy=None):
    """Independent trajectory oracle using the same float arithmetic."""
    policy = policy or TrustPolicy()
    trust = policy.initial_trust
    out = []
    for s in scores:
        trust = (1.0 - policy.smoothing) * trust + policy.smoothing * s
        out.append(trust)
    return out


def run(scores, policy=None):
    return list(stream_authenticate(scores, policy))


def test_constant_zero_scores_alarm_at_update_four():
    updates = run([0.0] * 6)
    assert [u.trust for u in updates] == recurrence([0.0] * 6)
    # closed form 0.7 * 0.8^k, checked loosely on top of the exact recurrence
    assert [u.trust for u in updates[:4]] == pytest.approx(
        [0.56, 0.448, 0.3584, 0.28672], rel=1e-12
    )
    assert [u.status for u in updates] == [
        STATUS_OK,        # 0.56 is still at or above the threshold
        STATUS_SUSPECT,   # 0.448: first low
        STATUS_SUSPECT,   # 0.3584: second low
        STATUS_ALARM,     # 0.28672: third consecutive low
        STATUS_ALARM,
        STATUS_ALARM,
    ]
    assert [u.low_run for u in updates] == [0, 1, 2, 3, 3, 3]
    assert [u.index for u in updates] == list(range(6))


def test_constant_one_scores_rise_monotonically_and_never_alarm():
    updates = run([1.0] * 30)
    trusts = [u.trust for u in updates]
    assert trusts == recurrence([1.0] * 30)
    assert all(b > a for a, b in zip([0.7] + trusts, trusts))
    assert all(u.status == STATUS_OK for u in updates)
    assert trusts[-1] > 0.99


def test_alternating_scores_never_alarm():
    scores = [1.0 if i % 2 == 0 else 0.0 for i in range(50)]
    updates = run(scores)
    trusts = [u.trust for u in updates]
    assert trusts == recurrence(scores)
    assert all(u.status != STATUS_ALARM for u in updates)
    assert max(u.low_run for u in updates) <= 1  # lows never chain
    # the oscillation settles into the band around 0.556 / 0.444: the low
    # phase eventually dips below the threshold, flagging isolated suspects
    assert trusts[-2] == pytest.approx(0.2 / 0.36, abs=1e-4)
    assert trusts[-1] == pytest.approx(0.16 / 0.36, abs=1e-4)
    assert any(u.status == STATUS_SUSPECT for u in updates)
    first_low = next(u.index for u in updates if u.status == STATUS_SUSPECT)
    assert first_low == 7  # update 8, 1-based


def test_recovery_resets_the_low_run():
    updates = run([0.0, 0.0, 1.0, 1.0, 1.0])
    assert [u.low_run for u in updates] == [0, 1, 0, 0, 0]
    assert updates[-1].status == STATUS_OK


def test_scores_outside_unit_interval_rejected():
    monitor = TrustMonitor()
    with pytest.raises(DataError):
        monitor.update(-0.1)
    with pytest.raises(DataError):
        monitor.update(1.5)
    with pytest.raises(DataError):
        monitor.update(math.nan)


def test_policy_validation():
    with pytest.raises(ConfigError):
        TrustPolicy(initial_trust=1.2)
    with pytest.raises(ConfigError):
        TrustPolicy(smoothing=0.0)
    with pytest.raises(ConfigError):
        TrustPolicy(smoothing=1.0001)
    with pytest.raises(ConfigError):
        TrustPolicy(threshold=-0.5)
    with pytest.raises(ConfigError):
        TrustPolicy(consecutive_limit=0)
    TrustPolicy(smoothing=1.0)  # trust tracks the raw score, still valid


def test_generator_equals_manual_monitor():
    scores = [0.9, 0.2, 0.4, 0.7, 0.1]
    monitor = TrustMonitor()
    manual = [monitor.update(s) for s in scores]
    assert run(scores) == manual
    assert all(isinstance(u, TrustUpdate) for u in manual)


def test_custom_policy_changes_the_alarm_point():
    policy = TrustPolicy(initial_trust=0.9, smoothing=0.5, threshold=0.6,
                         consecutive_limit=2)
    updates = run([0.0, 0.0, 0.0], policy)
    assert [u.trust for u in updates] == recurrence([0.0] * 3, policy)
    assert [u.status for u in updates] == [STATUS_SUSPECT, STATUS_ALARM, STATUS_ALARM]


@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=60))
@settings(max_examples=60, deadline=None)
def test_trust_stays_inside_unit_interval(scores):
    for update in stream_authenticate(scores):
        assert 0.0 <= update.trust <= 1.0
        assert 0 <= update.low_run <= TrustPolicy().consecutive_limit


def make_events(n, subject=1):
    return [RawEvent(timestamp=i * 0.01, x=float(i), y=2.0 * i, subject=subject)
            for i in range(n)]


def test_block_buffer_chunks_and_reports_pending():
    buffer = BlockBuffer(10)
    events = make_events(25)
    blocks = list(buffer.feed(events))
    assert len(blocks) == 2
    assert blocks[0] == tuple(events[:10])
    assert blocks[1] == tuple(events[10:20])
    assert buffer.pending == 5


def test_block_alignment_survives_split_feeds():
    events = make_events(47)
    one_shot = list(BlockBuffer(10).feed(events))
    split = BlockBuffer(10)
    chunked = []
    for cut in ((0, 7), (7, 23), (23, 23), (23, 47)):
        chunked.extend(split.feed(events[cut[0]:cut[1]]))
    assert chunked == one_shot
    assert split.pending == 7


def test_block_buffer_rejects_short_blocks():
    with pytest.raises(ConfigError):
        BlockBuffer(1)


def test_stream_summary_fields():
    summary = StreamSummary(n_events=25, n_actions=2, n_alarms=0,
                            discarded_events=5, final_trust=0.7,
                            final_status=STATUS_OK)
    assert summary.discarded_events == 5
    assert summary.final_status == STATUS_OK
