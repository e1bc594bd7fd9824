"""Metric tests: error measures, pinch-cycle accounting, histograms."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from trackspeed.engine import LogRecord
from trackspeed.errors import (
    DegenerateTrial,
    EmptySamples,
    InsufficientData,
    NoOperations,
    OutOfRange,
)
from trackspeed.metrics import (
    compute_trial_metrics,
    count_operations,
    count_overshoots,
    error_final,
    error_path,
    histogram,
    mean_ci95,
    operation_time,
    rescale_tlx,
    travel_distance,
)
from trackspeed.tasks import Shape, make_slider_trial, make_trace_path


def rec(t, obj, pinching, hand=(0.0, 0.0, 0.0), speed=1.0):
    return LogRecord(t, obj, pinching, hand, speed)


def dense_path_points(polyline, total=100_000):
    """Brute-force oracle support: the path resampled at ~uniform arc length."""
    pts = np.asarray(polyline, dtype=float)
    seg = np.diff(pts, axis=0)
    lengths = np.linalg.norm(seg, axis=1)
    per_seg = np.maximum((lengths / lengths.sum() * total).astype(int), 1)
    chunks = []
    for a, d, n in zip(pts[:-1], seg, per_seg):
        u = np.linspace(0.0, 1.0, n, endpoint=False)
        chunks.append(a + u[:, None] * d)
    chunks.append(pts[-1:])
    return np.concatenate(chunks)


class TestErrorFinal:
    def test_zero_at_target(self):
        assert error_final((1.0, 2.0, 3.0), (1.0, 2.0, 3.0)) == 0.0

    def test_pythagorean(self):
        assert error_final((0.0, 0.0, 0.0), (3.0, 4.0, 0.0)) == 5.0

    def test_slider_value_difference(self):
        a = (0.701 * 1.5, 0.0, 0.0)
        b = (0.700 * 1.5, 0.0, 0.0)
        assert error_final(a, b) == pytest.approx(0.0015, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            error_final((0.0, 0.0), (0.0, 0.0, 0.0))


class TestErrorPath:
    def test_perpendicular_distance_to_segment(self):
        path = make_trace_path(Shape.SQUARE)
        seg_path = type(path)(path.shape, ((0.0, 0.0), (1.0, 0.0)), False)
        assert error_path([(0.5, 0.1)], seg_path) == pytest.approx(0.1, abs=1e-12)

    def test_on_path_samples_have_zero_error(self):
        path = make_trace_path(Shape.TRIANGLE)
        samples = [path.polyline[0], path.polyline[1]]
        assert error_path(samples, path) == pytest.approx(0.0, abs=1e-12)

    def test_median_of_three(self):
        path = type(make_trace_path(Shape.SQUARE))(
            Shape.SQUARE, ((0.0, 0.0), (1.0, 0.0)), False
        )
        samples = [(0.5, 0.0), (0.5, 0.02), (0.5, 0.04)]
        assert error_path(samples, path) == pytest.approx(0.02, abs=1e-12)

    def test_empty_samples_rejected(self):
        with pytest.raises(EmptySamples):
            error_path([], make_trace_path(Shape.CIRCLE))

    @pytest.mark.parametrize("shape", [Shape.CIRCLE, Shape.STAR, Shape.SPIRAL])
    def test_matches_dense_brute_force(self, shape):
        path = make_trace_path(shape)
        dense = dense_path_points(path.polyline)
        rng = np.random.default_rng(31)
        pts = np.asarray(path.polyline)
        for _ in range(10):
            base = pts[rng.integers(0, len(pts), 30)]
            angles = rng.uniform(0, 2 * math.pi, 30)
            radii = rng.uniform(1e-3, 0.2, 30)
            samples = base + np.column_stack(
                [radii * np.cos(angles), radii * np.sin(angles)]
            )
            oracle = np.median(
                [np.linalg.norm(dense - s, axis=1).min() for s in samples]
            )
            assert error_path(samples, path) == pytest.approx(oracle, abs=1e-6)


class TestOperations:
    def cycle_records(self):
        return [
            rec(0.5, (0.0, 0.0, 0.0), False),
            rec(1.0, (0.0, 0.0, 0.0), True),
            rec(2.0, (0.0, 0.0, 0.0), True),
            rec(2.5, (0.0, 0.0, 0.0), False),
            rec(4.0, (0.0, 0.0, 0.0), True),
            rec(5.0, (0.0, 0.0, 0.0), False),
        ]

    def test_single_pinch_duration(self):
        records = [
            rec(1.0, (0.0, 0.0, 0.0), True),
            rec(3.0, (0.0, 0.0, 0.0), True),
            rec(3.5, (0.0, 0.0, 0.0), False),
        ]
        assert operation_time(records) == pytest.approx(2.5)

    def test_two_pinches_span_gap(self):
        records = self.cycle_records()
        assert operation_time(records) == pytest.approx(4.0)
        assert count_operations(records) == 2

    def test_no_pinch_raises(self):
        records = [rec(0.0, (0.0, 0.0, 0.0), False)]
        with pytest.raises(NoOperations):
            operation_time(records)
        assert count_operations(records) == 0

    def test_unterminated_pinch_closes_at_log_end(self):
        records = [
            rec(0.0, (0.0, 0.0, 0.0), False),
            rec(1.0, (0.0, 0.0, 0.0), True),
            rec(2.0, (0.0, 0.0, 0.0), True),
        ]
        assert count_operations(records) == 1
        assert operation_time(records) == pytest.approx(1.0)


class TestTravelDistance:
    def test_single_point(self):
        assert travel_distance([(1.0, 2.0, 3.0)]) == 0.0

    def test_unit_square_perimeter(self):
        walk = [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]
        assert travel_distance(walk) == pytest.approx(4.0)

    def test_back_and_forth(self):
        assert travel_distance([(0.0,), (1.0,), (0.0,)]) == pytest.approx(2.0)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            pts = rng.normal(0, 1, (20, 3))
            straight = float(np.linalg.norm(pts[-1] - pts[0]))
            assert travel_distance(pts) >= straight - 1e-12


class TestOvershoots:
    def walk(self, xs):
        return [rec(i * 0.01, (float(x), 0.0, 0.0), True) for i, x in enumerate(xs)]

    def test_monotone_approach_no_overshoot(self):
        records = self.walk(np.linspace(0.0, 1.0, 50))
        assert count_overshoots(records, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)) == 0

    def test_fifteen_percent_peak_counts_once(self):
        xs = list(np.linspace(0, 1.15, 40)) + list(np.linspace(1.15, 1.0, 20))
        records = self.walk(xs)
        assert count_overshoots(records, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)) == 1

    def test_five_percent_peak_does_not_count(self):
        xs = list(np.linspace(0, 1.05, 40)) + list(np.linspace(1.05, 1.0, 20))
        records = self.walk(xs)
        assert count_overshoots(records, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)) == 0

    def test_multiple_entries_counted(self):
        xs = [0.0, 1.2, 1.0, 1.15, 0.9, 1.2]
        records = self.walk(xs)
        assert count_overshoots(records, (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)) == 3

    def test_degenerate_trial_rejected(self):
        with pytest.raises(DegenerateTrial):
            count_overshoots(self.walk([0.0]), (1.0, 0.0, 0.0), (1.0, 0.0, 0.0))


class TestHistogram:
    def test_empty_values_all_zero(self):
        counts = histogram([], [0.0, 1.0, 2.0])
        assert counts.tolist() == [0, 0]

    def test_interior_edge_goes_to_upper_bin(self):
        counts = histogram([1.0], [0.0, 1.0, 2.0])
        assert counts.tolist() == [0, 1]

    def test_last_bin_closed(self):
        counts = histogram([2.0], [0.0, 1.0, 2.0])
        assert counts.tolist() == [0, 1]

    def test_counts_conserved_for_in_range_values(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            edges = np.sort(rng.uniform(0, 10, 5))
            while np.any(np.diff(edges) <= 0):
                edges = np.sort(rng.uniform(0, 10, 5))
            values = rng.uniform(edges[0], edges[-1], 50)
            assert histogram(values, edges).sum() == 50

    def test_rejects_unsorted_edges(self):
        with pytest.raises(ValueError):
            histogram([1.0], [0.0, 2.0, 1.0])


class TestMeanCi95:
    def test_constant_values_zero_width(self):
        mean, half = mean_ci95([2.0, 2.0, 2.0, 2.0])
        assert mean == 2.0
        assert half == 0.0

    def test_simple_mean(self):
        mean, _ = mean_ci95([1.0, 2.0, 3.0])
        assert mean == pytest.approx(2.0)

    def test_half_width_matches_t_oracle(self):
        # oracle: t(0.975, 2) * s / sqrt(3) with s = 1
        _, half = mean_ci95([1.0, 2.0, 3.0])
        expected = float(stats.t.ppf(0.975, 2)) * 1.0 / math.sqrt(3.0)
        assert half == pytest.approx(expected, abs=1e-12)
        assert half == pytest.approx(2.4841, abs=1e-3)

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            mean_ci95([1.0])


class TestRescaleTlx:
    def test_endpoints(self):
        assert rescale_tlx(0.0) == 1.0
        assert rescale_tlx(20.0) == 7.0

    def test_midpoint(self):
        assert rescale_tlx(10.0) == 4.0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            rescale_tlx(-0.1)
        with pytest.raises(OutOfRange):
            rescale_tlx(20.5)


class TestComputeTrialMetrics:
    def slider_records(self):
        task = make_slider_trial(2)
        target_x = task.target_position()[0]
        xs = np.concatenate(
            [np.linspace(0, target_x * 1.15, 60), np.linspace(target_x * 1.15, target_x, 40)]
        )
        records = [rec(0.0, (0.0, 0.0, 0.0), False)]
        records += [
            rec(0.01 * (i + 1), (float(x), 0.0, 0.0), True, hand=(float(x) * 2, 0.0, 0.0))
            for i, x in enumerate(xs)
        ]
        records.append(rec(0.01 * (len(xs) + 1), records[-1].object_pos, False))
        return task, records

    def test_slider_metrics_fields(self):
        task, records = self.slider_records()
        m = compute_trial_metrics(task, records, c=0.5)
        assert m.error_distance == pytest.approx(0.0, abs=1e-12)
        assert m.num_operations == 1
        assert m.overshoot_count == 1
        assert m.operation_time == pytest.approx(0.01 * len(records[1:-1]) + 0.0, abs=1e-6)
        assert m.hand_travel > m.object_travel > 0
        assert sum(m.speed_histogram["counts"]) == sum(1 for r in records if r.pinching)

    def test_metrics_survive_serialization_round_trip(self, tmp_path):
        import json

        from trackspeed.engine import read_trial_log, serialize_log

        task, records = self.slider_records()
        m1 = compute_trial_metrics(task, records, c=0.5)
        header = {"technique": "constant", "c": 0.5, "seed": 2, "task": task.to_json()}
        path = tmp_path / "log.jsonl"
        path.write_text(serialize_log(header, records))
        header2, records2 = read_trial_log(path)
        from trackspeed.tasks import task_from_json

        m2 = compute_trial_metrics(task_from_json(header2["task"]), records2, header2["c"])
        assert json.dumps(m1.to_json(), sort_keys=True) == json.dumps(m2.to_json(), sort_keys=True)

    def test_trace_metrics_use_path_error(self):
        # stroke drawn 0.02 m outside the square, along each edge's normal
        task = make_trace_path(Shape.SQUARE)
        pts = np.asarray(task.polyline)
        records = [rec(0.0, (0.0, 0.0, 0.0), False)]
        t = 0.01
        for a, b in zip(pts[:-1], pts[1:]):
            d = (b - a) / np.linalg.norm(b - a)
            normal = np.array([-d[1], d[0]])
            mid = (a + b) / 2
            if np.dot(normal, mid) < 0:
                normal = -normal
            for u in np.linspace(0.1, 0.9, 20):
                p = a + u * (b - a) + 0.02 * normal
                records.append(rec(t, (float(p[0]), float(p[1]), 0.0), True))
                t += 0.01
        records.append(rec(t, records[-1].object_pos, False))
        m = compute_trial_metrics(task, records, c=0.5)
        assert m.error_distance == pytest.approx(0.02, abs=1e-6)
        assert m.error_path_mean == pytest.approx(0.02, abs=1e-6)
        assert m.overshoot_count == 0

    def test_no_cycles_raises(self):
        task = make_slider_trial(2)
        with pytest.raises(NoOperations):
            compute_trial_metrics(task, [rec(0.0, (0.0, 0.0, 0.0), False)], c=0.5)
