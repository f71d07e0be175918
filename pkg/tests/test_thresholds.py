import math

import pytest

from fusioncodes.codes import code_from_progenitor, dual_code
from fusioncodes.graphs import build_progenitor
from fusioncodes.thresholds import (
    BiasConfig,
    BiasMode,
    ConfigError,
    ErrorThresholdConfig,
    boost_level_parameters,
    boosted_baseline,
    bias_ratio,
    correctable_region,
    default_bias_config,
    default_passive_table,
    example_error_threshold_table,
    invert_baseline_threshold,
    loss_threshold,
    randomized_bias_rate,
    search_best_code,
)


def code_of(seq):
    return code_from_progenitor(build_progenitor(seq), code_id=seq)


class TestBiasRates:
    def test_average(self):
        assert randomized_bias_rate(0.25, 0.25) == 0.25
        assert randomized_bias_rate(0.1, 0.5) == pytest.approx(0.3)

    def test_bare_qubit_reproduces_standard_fusion_average(self):
        # 1 - (1 - p_fail/2) eta^2 for the unencoded qubit
        from fusioncodes.fusion import FusionSpec, erasure_analysis

        code = code_of("L")
        for eta in (1.0, 0.9, 0.7):
            rep = erasure_analysis(code, FusionSpec(eta, 0.5, (0,)))
            avg = randomized_bias_rate(rep.erasure_rate("X"), rep.erasure_rate("Z"))
            assert avg == pytest.approx(1 - 0.75 * eta**2)

    def test_bias_ratio(self):
        assert bias_ratio(0.25, 0.5) == 0.5
        assert bias_ratio(0.3, 0.3) == 1.0
        assert bias_ratio(0.0, 0.3) == 0.0
        assert bias_ratio(0.0, 0.0) == 1.0

    def test_range_errors(self):
        with pytest.raises(ValueError):
            randomized_bias_rate(-0.1, 0.5)
        with pytest.raises(ValueError):
            bias_ratio(1.5, 0.5)


class TestBaselineInversion:
    def test_default_value(self):
        # boosted baseline: p_fail 1/4, four photons, 0.52% loss threshold
        assert invert_baseline_threshold() == pytest.approx(0.1430585, abs=1e-6)

    def test_round_trip_through_boosted_baseline(self):
        pt = invert_baseline_threshold()
        res = boosted_baseline(0.25, 2, pt)
        assert res.gamma_star == pytest.approx(0.0052, abs=1e-6)

    def test_boost_levels(self):
        assert boost_level_parameters(1) == (0.25, 2)
        assert boost_level_parameters(2) == (0.125, 6)
        assert boost_level_parameters(3) == (0.0625, 14)


class TestLossThreshold:
    def test_bare_qubit_boundary_case(self):
        # at eta=1 the averaged rate is exactly 1/4, so p~=1/4 sits on the boundary
        code = code_of("L")
        res = loss_threshold(code, BiasConfig(BiasMode.RANDOMIZED, 0.25))
        assert res.gamma_star == pytest.approx(0.0, abs=1e-6)
        assert res.diagnostics["feasible_at_zero_loss"]

    def test_bare_qubit_infeasible(self):
        code = code_of("L")
        res = loss_threshold(code, BiasConfig(BiasMode.RANDOMIZED, 0.134))
        assert res.gamma_star == 0.0
        assert not res.diagnostics["feasible_at_zero_loss"]

    def test_bisection_brackets_the_feasibility_boundary(self):
        code = code_of("LL")
        bias = BiasConfig(BiasMode.RANDOMIZED, invert_baseline_threshold())
        res = loss_threshold(code, bias)
        g = res.gamma_star
        assert g > 0

        from fusioncodes.fusion import FusionSpec, erasure_analysis

        def avg(gamma):
            rep = erasure_analysis(code, FusionSpec(1.0 - gamma, 0.5, res.w_star))
            return randomized_bias_rate(rep.erasure_rate("X"), rep.erasure_rate("Z"))

        assert avg(g - 1e-6) <= bias.p_tilde_randomized + 1e-12
        assert avg(g + 1e-6) > bias.p_tilde_randomized

    def test_two_qubit_code_threshold_value(self):
        # averaged rate in closed form: 1 - eta^2/2 - 3 eta^4/8 = p~
        code = code_of("LL")
        res = loss_threshold(code, BiasConfig(BiasMode.RANDOMIZED, invert_baseline_threshold()))
        y = (-4.0 / 3.0 + math.sqrt(16.0 / 9.0 + 32.0 * (1 - invert_baseline_threshold()) / 3.0)) / 2.0
        assert res.gamma_star == pytest.approx(1.0 - math.sqrt(y), abs=1e-7)

    def test_dual_swap_neutral_under_randomized_bias(self):
        bias = BiasConfig(BiasMode.RANDOMIZED, invert_baseline_threshold())
        for seq in ("LL", "LP", "LLP", "LPL"):
            code = code_of(seq)
            a = loss_threshold(code, bias)
            b = loss_threshold(dual_code(code), bias)
            assert a.gamma_star == pytest.approx(b.gamma_star, abs=1e-8)

    def test_passive_mode_runs_and_uses_table(self):
        pt = invert_baseline_threshold()
        bias = BiasConfig(BiasMode.PASSIVE, pt, default_passive_table(pt))
        res = loss_threshold(code_of("LLL"), bias)
        assert res.bias_mode is BiasMode.PASSIVE
        assert 0.0 < res.gamma_star < 0.1


class TestSearch:
    def test_single_qubit_search(self):
        bias = BiasConfig(BiasMode.RANDOMIZED, invert_baseline_threshold())
        res = search_best_code(1, bias)
        assert len(res) == 1
        assert res[0].gamma_star == 0.0

    def test_results_sorted_and_deterministic(self):
        bias = BiasConfig(BiasMode.RANDOMIZED, invert_baseline_threshold())
        a = search_best_code(3, bias)
        b = search_best_code(3, bias)
        assert [(r.code_id, r.gamma_star) for r in a] == [(r.code_id, r.gamma_star) for r in b]
        gammas = [r.gamma_star for r in a]
        assert gammas == sorted(gammas, reverse=True)

    def test_threads_agree_with_serial(self):
        bias = BiasConfig(BiasMode.RANDOMIZED, invert_baseline_threshold())
        a = search_best_code(3, bias, threads=1)
        b = search_best_code(3, bias, threads=4)
        assert [(r.code_id, r.gamma_star) for r in a] == [(r.code_id, r.gamma_star) for r in b]

    def test_size_bounds(self):
        bias = BiasConfig(BiasMode.RANDOMIZED, 0.14)
        with pytest.raises(ValueError):
            search_best_code(0, bias)
        with pytest.raises(ValueError):
            search_best_code(9, bias)


class TestBoostedBaseline:
    def test_level_ladder(self):
        pt = invert_baseline_threshold()
        g1 = boosted_baseline(*boost_level_parameters(1), pt).gamma_star
        g2 = boosted_baseline(*boost_level_parameters(2), pt).gamma_star
        g3 = boosted_baseline(*boost_level_parameters(3), pt).gamma_star
        assert g1 == pytest.approx(0.0052, rel=0.01)
        assert g2 == pytest.approx(0.01, rel=0.2)
        assert g3 < g2

    def test_closed_form(self):
        pt = 0.14
        res = boosted_baseline(0.25, 2, pt)
        want = 1.0 - ((1.0 - pt) / (1.0 - 0.125)) ** 0.25
        assert res.gamma_star == pytest.approx(want, abs=1e-8)


class TestRegion:
    def test_zero_epsilon_table_gives_empty_boundary(self):
        code = code_of("LL")
        bias = BiasConfig(BiasMode.RANDOMIZED, invert_baseline_threshold())
        err = ErrorThresholdConfig(((0.0, 0.0), (1.0, 0.0)))
        pts = correctable_region(code, bias, err, grid_points=5)
        assert pts and all(p.epsilon_boundary == 0.0 for p in pts)

    def test_region_closes_at_loss_threshold(self):
        code = code_of("LL")
        bias = BiasConfig(BiasMode.RANDOMIZED, invert_baseline_threshold())
        err = ErrorThresholdConfig(example_error_threshold_table())
        pts = correctable_region(code, bias, err, grid_points=9)
        assert pts[-1].epsilon_boundary == pytest.approx(0.0, abs=1e-6)
        assert pts[0].epsilon_boundary > 0.0

    def test_boundary_shrinks_with_loss(self):
        code = code_of("LLL")
        bias = BiasConfig(BiasMode.RANDOMIZED, invert_baseline_threshold())
        err = ErrorThresholdConfig(example_error_threshold_table())
        pts = correctable_region(code, bias, err, grid_points=9)
        eps = [p.epsilon_boundary for p in pts]
        assert all(b <= a + 1e-9 for a, b in zip(eps, eps[1:]))

    def test_infeasible_code_yields_empty_region(self):
        code = code_of("L")
        bias = BiasConfig(BiasMode.RANDOMIZED, 0.1)
        err = ErrorThresholdConfig(example_error_threshold_table())
        assert correctable_region(code, bias, err) == []

    def test_passive_mode_rejected(self):
        pt = invert_baseline_threshold()
        bias = BiasConfig(BiasMode.PASSIVE, pt, default_passive_table(pt))
        err = ErrorThresholdConfig(example_error_threshold_table())
        with pytest.raises(ValueError):
            correctable_region(code_of("LL"), bias, err)


class TestConfig:
    def test_default_config_valid(self):
        cfg = default_bias_config()
        assert cfg.p_tilde_randomized == pytest.approx(0.1430585, abs=1e-6)
        assert cfg.passive_threshold(1.0) == pytest.approx(cfg.p_tilde_randomized, rel=1e-9)
        assert cfg.passive_threshold(0.0) > cfg.passive_threshold(1.0)

    def test_interpolation(self):
        cfg = BiasConfig(BiasMode.PASSIVE, 0.14, ((0.0, 0.3), (1.0, 0.1)))
        assert cfg.passive_threshold(0.5) == pytest.approx(0.2)
        assert cfg.passive_threshold(-1.0) == 0.3
        assert cfg.passive_threshold(2.0) == pytest.approx(0.1)

    def test_schema_errors(self):
        with pytest.raises(ConfigError):
            BiasConfig(BiasMode.RANDOMIZED, 1.5)
        with pytest.raises(ConfigError):
            BiasConfig(BiasMode.PASSIVE, 0.14, ())
        with pytest.raises(ConfigError):
            BiasConfig(BiasMode.PASSIVE, 0.14, ((0.5, 0.2), (0.1, 0.3)))
        with pytest.raises(ConfigError):
            ErrorThresholdConfig(((0.0, -0.1),))

    def test_load_config_errors(self, tmp_path):
        from fusioncodes.thresholds import load_config

        p = tmp_path / "cfg.json"
        p.write_text("{}")
        with pytest.raises(ConfigError, match="p_tilde_randomized"):
            load_config(p)
        p.write_text("not json")
        with pytest.raises(ConfigError):
            load_config(p)

    def test_load_config_roundtrip(self, tmp_path):
        import json

        from fusioncodes.thresholds import config_to_json_dict, load_config

        cfg = default_bias_config()
        err = ErrorThresholdConfig(example_error_threshold_table())
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(config_to_json_dict(cfg, err)))
        rand, passive, err2 = load_config(p)
        assert rand.p_tilde_randomized == cfg.p_tilde_randomized
        assert passive.mode is BiasMode.PASSIVE
        assert err2 is not None
        assert err2.epsilon_m(0.0) == pytest.approx(err.epsilon_m(0.0))
