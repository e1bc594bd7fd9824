"""Technique mapping tests: anchors, ranges, continuity, scaling."""

from __future__ import annotations

import numpy as np
import pytest

from trackspeed.mapping import (
    Technique,
    TechniqueConfig,
    cursor_radius,
    eval_constant,
    eval_forcepinch,
    eval_gogo,
    eval_prism,
    speed_bounds,
)


def cfg_for(technique: Technique, c: float) -> TechniqueConfig:
    return TechniqueConfig(technique=technique, base_gain_c=c)


class TestConstant:
    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
    def test_identity_in_c(self, c):
        assert eval_constant(cfg_for(Technique.CONSTANT, c)) == c


class TestGoGo:
    def test_flat_phase(self):
        assert eval_gogo(0.05, cfg_for(Technique.GOGO, 0.5)) == 0.5

    def test_max_at_half_meter(self):
        assert eval_gogo(0.5, cfg_for(Technique.GOGO, 0.5)) == pytest.approx(2.0, abs=1e-12)

    def test_linear_interior(self):
        # independent linear-interpolation oracle: c + ((d-0.1)/0.4) * 3c
        d, c = 0.3, 1.0
        expected = c + ((d - 0.1) / (0.5 - 0.1)) * 3.0 * c
        assert eval_gogo(d, cfg_for(Technique.GOGO, c)) == pytest.approx(expected, abs=1e-12)
        assert expected == 2.5

    def test_clamped_beyond_max(self):
        assert eval_gogo(0.9, cfg_for(Technique.GOGO, 1.0)) == 4.0

    def test_rejects_negative_displacement(self):
        with pytest.raises(ValueError):
            eval_gogo(-0.01, cfg_for(Technique.GOGO, 1.0))

    def test_continuity_at_flat_breakpoint(self):
        cfg = cfg_for(Technique.GOGO, 1.0)
        eps = 1e-10
        assert eval_gogo(0.1 - eps, cfg) == pytest.approx(eval_gogo(0.1 + eps, cfg), abs=1e-8)


class TestPrism:
    def test_min_at_rest(self):
        assert eval_prism(0.0, cfg_for(Technique.PRISM, 0.5)) == 0.125

    def test_max_at_limit(self):
        assert eval_prism(0.75, cfg_for(Technique.PRISM, 0.5)) == pytest.approx(2.0, abs=1e-12)

    def test_linear_midpoint(self):
        # midpoint oracle: 0.25 + 0.5 * (4 - 0.25)
        expected = 0.25 + 0.5 * (4.0 - 0.25)
        assert eval_prism(0.375, cfg_for(Technique.PRISM, 1.0)) == pytest.approx(expected, abs=1e-12)
        assert expected == 2.125

    def test_clamped_beyond_limit(self):
        assert eval_prism(2.0, cfg_for(Technique.PRISM, 1.0)) == 4.0

    def test_rejects_negative_velocity(self):
        with pytest.raises(ValueError):
            eval_prism(-0.1, cfg_for(Technique.PRISM, 1.0))

    def test_continuity_at_saturation(self):
        cfg = cfg_for(Technique.PRISM, 1.0)
        eps = 1e-10
        assert eval_prism(0.75 - eps, cfg) == pytest.approx(eval_prism(0.75 + eps, cfg), abs=1e-8)


class TestForcePinch:
    @pytest.mark.parametrize("c", [0.5, 1.0])
    def test_anchor_exactness(self, c):
        cfg = cfg_for(Technique.FORCEPINCH, c)
        assert eval_forcepinch(0.0, cfg) == pytest.approx(4.0 * c, abs=1e-9)
        assert eval_forcepinch(0.5, cfg) == pytest.approx(1.0 * c, abs=1e-9)
        assert eval_forcepinch(1.0, cfg) == pytest.approx(0.25 * c, abs=1e-9)

    def test_quarter_force_between_anchors(self):
        val = eval_forcepinch(0.25, cfg_for(Technique.FORCEPINCH, 1.0))
        assert 1.0 < val < 4.0

    def test_out_of_range_forces_clamp(self):
        cfg = cfg_for(Technique.FORCEPINCH, 1.0)
        assert eval_forcepinch(-3.0, cfg) == 4.0
        assert eval_forcepinch(7.0, cfg) == 0.25

    def test_strictly_decreasing_on_dense_grid(self):
        cfg = cfg_for(Technique.FORCEPINCH, 1.0)
        grid = np.linspace(0.0, 1.0, 10000)
        vals = np.array([eval_forcepinch(float(f), cfg) for f in grid])
        assert np.all(np.diff(vals) < 0.0)
        assert vals.max() <= 4.0 + 1e-15
        assert vals.min() >= 0.25 - 1e-15


class TestRangeContainment:
    N = 10000

    def test_all_techniques_within_stated_ranges(self):
        rng = np.random.default_rng(42)
        for c in (0.5, 1.0):
            gogo = cfg_for(Technique.GOGO, c)
            prism = cfg_for(Technique.PRISM, c)
            fp = cfg_for(Technique.FORCEPINCH, c)
            for d in rng.uniform(0.0, 2.0, self.N):
                assert c <= eval_gogo(float(d), gogo) <= 4.0 * c
            for v in rng.uniform(0.0, 3.0, self.N):
                assert 0.25 * c <= eval_prism(float(v), prism) <= 4.0 * c
            for f in rng.uniform(-0.5, 1.5, self.N):
                assert 0.25 * c <= eval_forcepinch(float(f), fp) <= 4.0 * c
            lo, hi = speed_bounds(gogo)
            assert (lo, hi) == (c, 4.0 * c)


class TestScaling:
    def test_doubling_c_doubles_output(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            c = float(rng.uniform(0.1, 3.0))
            x = float(rng.uniform(0.0, 1.5))
            assert eval_gogo(x, cfg_for(Technique.GOGO, 2 * c)) == pytest.approx(
                2 * eval_gogo(x, cfg_for(Technique.GOGO, c)), rel=1e-12
            )
            assert eval_prism(x, cfg_for(Technique.PRISM, 2 * c)) == pytest.approx(
                2 * eval_prism(x, cfg_for(Technique.PRISM, c)), rel=1e-12
            )
            f = min(x, 1.0)
            assert eval_forcepinch(f, cfg_for(Technique.FORCEPINCH, 2 * c)) == pytest.approx(
                2 * eval_forcepinch(f, cfg_for(Technique.FORCEPINCH, c)), rel=1e-12
            )
            assert eval_constant(cfg_for(Technique.CONSTANT, 2 * c)) == 2 * eval_constant(
                cfg_for(Technique.CONSTANT, c)
            )


class TestCursorRadius:
    def test_endpoints(self):
        cfg = cfg_for(Technique.FORCEPINCH, 1.0)
        assert cursor_radius(4.0, cfg) == cfg.cursor.r_max
        assert cursor_radius(0.25, cfg) == cfg.cursor.r_min

    def test_base_gain_sits_at_log_midpoint(self):
        # log-position of c in [0.25c, 4c] is log(4)/log(16) =  0.5
        cfg = cfg_for(Technique.FORCEPINCH, 1.0)
        u = np.log(4.0) / np.log(16.0)
        expected = cfg.cursor.r_min + u * (cfg.cursor.r_max - cfg.cursor.r_min)
        assert cursor_radius(1.0, cfg) == pytest.approx(expected, abs=1e-12)

    def test_strictly_increasing_in_speed(self):
        cfg = cfg_for(Technique.FORCEPINCH, 0.5)
        speeds = np.linspace(0.125, 2.0, 500)
        radii = [cursor_radius(float(s), cfg) for s in speeds]
        assert all(b > a for a, b in zip(radii, radii[1:]))

    def test_constant_technique_pins_radius_at_c(self):
        cfg = cfg_for(Technique.CONSTANT, 0.5)
        r_at_c = cursor_radius(0.5, cfg_for(Technique.FORCEPINCH, 0.5))
        assert cursor_radius(0.125, cfg) == r_at_c
        assert cursor_radius(2.0, cfg) == r_at_c


class TestConfigValidation:
    def test_rejects_nonpositive_gain(self):
        with pytest.raises(ValueError):
            TechniqueConfig(technique=Technique.CONSTANT, base_gain_c=0.0)

    def test_rejects_unsorted_anchors(self):
        from trackspeed.mapping import ForcePinchParams

        with pytest.raises(ValueError):
            TechniqueConfig(
                technique=Technique.FORCEPINCH,
                forcepinch=ForcePinchParams(anchors_norm=((0.0, 4.0), (0.5, 4.5), (1.0, 0.25))),
            )
