import json

import numpy as np
import pytest

from gad.capture import GaitSegment
from gad.cascade import (
    SOURCE_AD1,
    SOURCE_AD2,
    SOURCE_BOTH,
    SOURCE_NONE,
    DetectorState,
    basegen_run,
)
from gad.errors import GenerationError, UsageError
from gad.lstm import HyperParams
from gad.stage import ROLE_CONVERTER, Stage


def make_segment(values, step_len):
    values = tuple(float(v) for v in values)
    return GaitSegment(
        values=values,
        t_start=1,
        t_end=1 + step_len,
        t_fin=len(values),
        step_len=step_len,
    )


def periodic(step_len, n, seed=0, noise=0.02):
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    return 9.8 + np.sin(2 * np.pi * t / step_len) + rng.normal(0, noise, n)


def profiles():
    return HyperParams.converter_profile(), HyperParams.detector_profile()


class TestConstruction:
    def test_step_len_too_small(self):
        conv, det = profiles()
        with pytest.raises(UsageError):
            DetectorState(1, conv, det)

    def test_not_ready_until_basegen(self):
        conv, det = profiles()
        state = DetectorState(30, conv, det)
        assert not state.ready
        with pytest.raises(UsageError):
            state.feed_online(9.8, 1)


class TestBaseGen:
    def test_short_segment_rejected(self):
        conv, det = profiles()
        state = DetectorState(30, conv, det)
        with pytest.raises(GenerationError):
            state.run_basegen(make_segment([9.8] * 10, 30))
        assert not state.ready

    def test_minimal_ready_length(self):
        # s2 receives n - 2L + 1 values, so d2 receives n - 4L + 2 and first
        # holds a model (3 inputs) at n = 4L + 1.
        conv, det = profiles()
        L = 30
        values = periodic(L, 4 * L + 1, seed=3)
        state = DetectorState(L, conv, det)
        state.run_basegen(make_segment(values, L))
        assert state.ready
        too_short = DetectorState(L, conv, det)
        with pytest.raises(GenerationError):
            too_short.run_basegen(make_segment(values[:-1], L))

    def test_first_d1_input_at_local_92_for_L46(self):
        # The first AARE leaves s1 at input 2L = 92; d1's input counter must
        # therefore first move on the segment's 92nd value.
        conv, det = profiles()
        L = 46
        values = periodic(L, 2 * L, seed=1)
        state = DetectorState(L, conv, det)
        for k, r in enumerate(values, 1):
            state._feed(float(r))
            if k < 2 * L:
                assert state.d1.input_count == 0
        assert state.d1.input_count == 1

    def test_d1_before_s2_ordering(self):
        # d1 receives exactly the values s2 receives, in the same order, and
        # its counter is never behind s2's.
        conv, det = profiles()
        L = 30
        values = periodic(L, 8 * L, seed=2)
        state = DetectorState(L, conv, det)
        for r in values:
            state._feed(float(r))
            assert state.d1.input_count == state.s2.input_count

    def test_basegen_factory(self):
        conv, det = profiles()
        L = 30
        segment = make_segment(periodic(L, 7 * L + 1, seed=4), L)
        state = basegen_run(segment, conv, det)
        assert state.ready
        assert state.step_len == L


@pytest.fixture(scope="module")
def trained():
    conv, det = profiles()
    L = 30
    values = periodic(L, 7 * L + 1, seed=5)
    state = DetectorState(L, conv, det)
    state.run_basegen(make_segment(values, L))
    return state, L


class TestOnline:
    def test_genuine_continuation_quiet(self, trained):
        state, L = trained
        state = state.snapshot()
        cont = periodic(L, 9 * L, seed=5)[7 * L + 1 :]
        decisions = [state.feed_online(float(r), k) for k, r in enumerate(cont, 1)]
        assert sum(d.anomaly for d in decisions) == 0
        assert all(d.source == SOURCE_NONE for d in decisions)

    def test_foreign_stream_detected(self, trained):
        state, L = trained
        state = state.snapshot()
        foreign = periodic(47, 4 * 47, seed=99)
        decisions = [
            state.feed_online(float(r), k) for k, r in enumerate(foreign, 1)
        ]
        flagged = [d for d in decisions if d.anomaly]
        assert flagged
        assert all(
            d.source in (SOURCE_AD1, SOURCE_AD2, SOURCE_BOTH) for d in flagged
        )

    def test_stream_index_passthrough(self, trained):
        state, _ = trained
        state = state.snapshot()
        d = state.feed_online(9.8, 1234)
        assert d.stream_index == 1234

    def test_snapshot_isolated(self, trained):
        state, L = trained
        snap = state.snapshot()
        cont = periodic(L, 9 * L, seed=5)[7 * L + 1 :]
        a = [snap.snapshot().feed_online(float(r), 1).anomaly for r in cont[:5]]
        for r in cont[:50]:
            snap.feed_online(float(r), 1)
        b = [
            state.snapshot().feed_online(float(r), 1).anomaly for r in cont[:5]
        ]
        assert a == b


class TestInheritance:
    def test_basegen_plus_online_equals_continuous(self):
        """The BaseGen -> OLAD hand-off must not perturb any stage state.

        Run A: basegen over the first 7L+1 values, then online over the rest.
        Run B: one uninterrupted pass of everything through `_feed`.
        Every stage of both runs must end bit-identical.
        """
        conv, det = profiles()
        L = 30
        all_values = [float(v) for v in periodic(L, 10 * L, seed=6)]
        split = 7 * L + 1

        a = DetectorState(L, conv, det)
        a.run_basegen(make_segment(all_values[:split], L))
        for k, r in enumerate(all_values[split:], 1):
            a.feed_online(r, k)

        b = DetectorState(L, conv, det)
        for r in all_values:
            b._feed(r)

        for name in ("s1", "d1", "s2", "d2"):
            sa, sb = getattr(a, name), getattr(b, name)
            assert sa.input_count == sb.input_count
            assert list(sa._buf) == list(sb._buf)
            assert sa.thresholds.to_dict() == sb.thresholds.to_dict()
            assert sa._pending == sb._pending
            if sa.model is not None:
                assert np.array_equal(sa.model.wi, sb.model.wi)
                assert np.array_equal(sa.model.wr, sb.model.wr)
                assert np.array_equal(sa.model.wo, sb.model.wo)


class TestSerialization:
    def test_round_trip_continues_identically(self):
        conv, det = profiles()
        L = 30
        values = [float(v) for v in periodic(L, 7 * L + 1, seed=7)]
        state = DetectorState(L, conv, det)
        state.run_basegen(make_segment(values, L))
        payload = json.loads(json.dumps(state.to_dict()))
        restored = DetectorState.from_dict(payload)
        assert restored.ready and restored.step_len == L
        tail = [float(v) for v in periodic(L, 9 * L, seed=7)[7 * L + 1 :]]
        for k, r in enumerate(tail, 1):
            assert state.feed_online(r, k) == restored.feed_online(r, k)

    def test_unknown_version_rejected(self):
        conv, det = profiles()
        payload = DetectorState(30, conv, det).to_dict()
        payload["version"] = 2
        with pytest.raises(UsageError):
            DetectorState.from_dict(payload)
