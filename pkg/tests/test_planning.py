import json
import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner
from scipy.integrate import trapezoid
from evtol_traversal_planner.core import CONFIG
from evtol_traversal_planner.core.config import PATHS
import evtol_traversal_planner.core.errors as errors
from evtol_traversal_planner.cli_io import BENCHMARK_COLUMNS, benchmark_table, load_mission, sweep
from evtol_traversal_planner.frames_wind import WindSpec, ground_speed_for_airspeed, normalize_angle, required_heading_rate
from evtol_traversal_planner.main import cli
from evtol_traversal_planner.maneuver_primitives import (
    PrimitiveKind, build_primitive, initial_hover_course, plan_with_primitives
)
from evtol_traversal_planner.no_wind_optimizer import (
    CriticalPointKind, TraversalQuery, grid_oracle, optimize, sample_traversal, segment_energy, surface_consistency,
    traversal_energy
)
from evtol_traversal_planner.spline_profiles import v_max_achievable
from evtol_traversal_planner.trajectory import TIMESERIES_COLUMNS
from evtol_traversal_planner.vehicle_model import EnergyPerDistanceFit, FlightMode
from evtol_traversal_planner.wind_planner import (
    WindTraversalConfig, comp_acc_seg, feasibility_band, straight_traversal_in_wind
)
from .conftest import write_mission
from .test_data import TestData


def _energy_or_none(v, a_plus, a_minus, l, m):
    try:
        return traversal_energy(v, a_plus, a_minus, l, m)[0]
    except errors.NegativeCruise:
        return None


class TestNoWindOptimizer:
    @pytest.mark.parametrize("length", TestData.BOUNDARY_LENGTHS)
    def test_short_segments_have_no_cruise(self, vehicle, length):
        opt = optimize(TraversalQuery.symmetric(length, 1.0, vehicle))
        assert opt.critical_point_kind is CriticalPointKind.BOUNDARY
        assert opt.l_cruise == pytest.approx(0.0, abs=1e-3 * length)
        assert opt.v_c == pytest.approx(v_max_achievable(length, opt.a_plus, opt.a_minus), rel=1e-3)

    @pytest.mark.parametrize("length", TestData.CRUISE_AT_BEST_LENGTHS)
    def test_long_segments_cruise_at_best_speed(self, vehicle, length):
        opt = optimize(TraversalQuery.symmetric(length, 1.0, vehicle))
        assert opt.v_c == pytest.approx(TestData.BEST_CRUISE_SPEED, abs=1e-3)
        assert opt.l_cruise > 0
        assert sum(opt.energy_breakdown) == pytest.approx(opt.energy_total)

    def test_minimum_length_at_hybrid_entry(self, vehicle):
        opt = optimize(TraversalQuery.symmetric(4.0, 1.5, vehicle))
        assert opt.v_c == pytest.approx(vehicle.v_qh, abs=1e-6)
        assert opt.l_cruise == pytest.approx(0.0, abs=1e-6)
        assert opt.critical_point_kind is CriticalPointKind.BOUNDARY

    def test_quad_hop_fallback(self, vehicle):
        opt = optimize(TraversalQuery.symmetric(2.0, 1.0, vehicle))
        assert opt.critical_point_kind is CriticalPointKind.FALLBACK
        assert opt.v_c < vehicle.v_qh
        assert opt.energy_total > 0
        assert grid_oracle(TraversalQuery.symmetric(2.0, 1.0, vehicle)).critical_point_kind is CriticalPointKind.FALLBACK

    @pytest.mark.parametrize("length", [20.0, 100.0, 500.0])
    def test_vehicle_acceleration_limits(self, vehicle, length):
        q = TraversalQuery.symmetric(length, vehicle.a_lim_plus, vehicle)
        opt = optimize(q)
        assert opt.a_plus <= vehicle.a_lim_plus
        assert opt.a_minus >= vehicle.a_lim_minus
        assert opt.l_cruise >= 0
        assert opt.energy_total > 0
        assert sum(opt.energy_breakdown) == pytest.approx(opt.energy_total)

    def test_segment_energy_outside_fitted_domain(self, vehicle):
        # below the fitted speeds and above the fitted rates the spline is integrated
        for v_c, a in ((1.0, 1.0), (1.0, -1.0), (5.0, 2.0), (5.0, -2.0)):
            assert segment_energy(v_c, a, vehicle) > 0

    def test_surface_matches_spline_integration(self, vehicle):
        df = surface_consistency(vehicle)
        assert len(df) == 110
        assert list(df.columns) == ["v_c", "a_max", "surface_j", "integrated_j", "rel_error"]
        accel_at_best = df[(df["v_c"] == 12.0) & (df["a_max"] > 0)]
        assert len(accel_at_best) == 5
        assert (accel_at_best["rel_error"].abs() <= 0.05).all()
        # the fitted decel surface and the low-speed corner disagree with the integrated power
        row = df[(df["v_c"] == 12.0) & (df["a_max"] == -1.5)].iloc[0]
        assert abs(row.rel_error) > 0.1
        row = df[(df["v_c"] == 2.0) & (df["a_max"] == 1.5)].iloc[0]
        assert abs(row.rel_error) > 0.15

    def test_interior_solution(self, vehicle):
        fits = dict(vehicle.epd_fits)
        # constant 400 W in Hybrid mode makes the cruise speed trade-off interior
        fits[FlightMode.HYBRID] = EnergyPerDistanceFit(form="power", coefficients={"f0": 400.0, "f1": 1.0, "f2": 0.0},
                                                       rmse=0.0)
        flat = vehicle.model_copy(update={"epd_fits": fits})
        q = TraversalQuery.symmetric(50.0, 1.0, flat)
        opt = optimize(q)
        assert opt.critical_point_kind is CriticalPointKind.SOLUTION
        assert opt.v_c == pytest.approx(5.22, abs=0.1)
        assert opt.l_cruise == pytest.approx(9.13, abs=0.5)
        corner = traversal_energy(v_max_achievable(50.0, 1.0, -1.0), 1.0, -1.0, 50.0, flat)[0]
        assert opt.energy_total < corner
        assert opt.energy_total <= grid_oracle(q).energy_total * (1 + 1e-5)

    def test_query_validation(self, vehicle):
        with pytest.raises(ValueError):
            TraversalQuery(length=100.0, a_lim_plus=3.0, a_lim_minus=-1.0, vehicle=vehicle)
        with pytest.raises(ValueError):
            TraversalQuery(length=-1.0, a_lim_plus=1.0, a_lim_minus=-1.0, vehicle=vehicle)

    def test_negative_cruise(self, vehicle):
        with pytest.raises(errors.NegativeCruise):
            traversal_energy(12.0, 1.0, -1.0, 100.0, vehicle)

    def test_matches_grid_oracle(self, vehicle):
        rng = np.random.default_rng(7)
        s = CONFIG.OPTIMIZER
        for length, a_lim in zip(rng.uniform(8.0, 600.0, 20), rng.choice([1.0, 1.25, 1.5], 20)):
            q = TraversalQuery.symmetric(float(length), float(a_lim), vehicle)
            opt = optimize(q)
            grid = grid_oracle(q)
            assert opt.energy_total <= grid.energy_total * (1 + 1e-5), f"l={length:.1f}, a={a_lim}"
            # nearest lattice point: lower speed, larger |a|
            nearby = [
                _energy_or_none(max(opt.v_c - s.grid_dv, vehicle.v_qh), opt.a_plus, opt.a_minus, q.length, vehicle),
                _energy_or_none(opt.v_c, min(opt.a_plus + s.grid_da, q.a_lim_plus), opt.a_minus, q.length, vehicle),
                _energy_or_none(opt.v_c, opt.a_plus, max(opt.a_minus - s.grid_da, q.a_lim_minus), q.length, vehicle),
            ]
            spread = sum(abs(e - opt.energy_total) for e in nearby if e is not None)
            assert grid.energy_total - opt.energy_total <= 2 * spread + 1e-6 * grid.energy_total, \
                f"l={length:.1f}, a={a_lim}"

    def test_sampled_traversal(self, vehicle):
        opt = optimize(TraversalQuery.symmetric(500.0, 1.5, vehicle))
        series, summary = sample_traversal(opt, vehicle, course=np.pi / 2)
        assert series.t[0] == 0.0
        assert np.all(np.diff(series.t) > 0)
        assert series.v_a[0] == pytest.approx(0.0)
        assert series.v_a[-1] == pytest.approx(0.0, abs=1e-9)
        assert sum(summary.distances) == pytest.approx(500.0)
        assert series.total_energy == pytest.approx(summary.total_energy, rel=1e-6)
        assert set(series.mode) == {"Quad", "Hybrid", "Plane"}


class TestWindPlanner:
    def test_crosswind_benchmark_segment(self, vehicle, segment, crosswind):
        result = straight_traversal_in_wind(*segment, crosswind, vehicle)
        assert result.stf
        assert result.v_gc == pytest.approx(TestData.CROSSWIND_CRUISE_GROUND_SPEED, abs=1e-3)
        assert np.rad2deg(abs(result.crab_angle)) == pytest.approx(19.47, abs=0.05)
        assert result.cruise_airspeed == pytest.approx(12.0)
        assert result.max_heading_rate_deg == pytest.approx(TestData.CROSSWIND_MAX_HEADING_RATE_DEG, abs=0.5)
        assert result.series.total_energy == pytest.approx(TestData.MODE_BENCHMARK["Quad+Hybrid+Plane"][1],
                                                           rel=TestData.ENERGY_REL_TOL)
        assert result.series.peak_power == pytest.approx(TestData.BENCHMARK_PEAK_POWER, rel=0.02)

    def test_backoff_from_initial_acceleration(self, vehicle, crosswind):
        cfg = WindTraversalConfig.from_settings(TestData.CROSSWIND_CRUISE_GROUND_SPEED)
        seg = comp_acc_seg(cfg.v_gc_star, cfg.initial_a_g_max, np.pi / 2, crosswind, cfg, vehicle)
        assert seg.within_limits
        assert seg.a_g_max == pytest.approx(2.25)
        assert seg.length == pytest.approx(0.75 * cfg.v_gc_star ** 2 / 2.25)

    def test_heading_rate_matches_wind_triangle(self, vehicle, segment, crosswind):
        part = straight_traversal_in_wind(*segment, crosswind, vehicle).accel.part
        checked = 0
        for v_g, v_a, a_a, rate in zip(*(x[1:-1] for x in (part.v_g, part.v_a, part.a_a, part.sigma_dot))):
            if v_g > 0.5 and abs(rate) > np.deg2rad(0.1):
                expected = required_heading_rate(float(v_a), float(a_a), np.pi / 2, crosswind)
                assert rate == pytest.approx(expected, rel=0.05)
                checked += 1
        assert checked > 100

    def test_near_tailwind_not_flyable(self, vehicle, segment, tailwind):
        assert not straight_traversal_in_wind(*segment, tailwind, vehicle).stf

    def test_headwind(self, vehicle, segment, headwind, still_air):
        result = straight_traversal_in_wind(*segment, headwind, vehicle)
        assert result.stf
        assert result.v_gc == pytest.approx(8.0)
        calm = straight_traversal_in_wind(*segment, still_air, vehicle)
        assert result.summary.energies[1] > calm.summary.energies[1]

    def test_still_air_reduces_to_ground_track(self, vehicle, segment, still_air):
        result = straight_traversal_in_wind(*segment, still_air, vehicle)
        assert result.stf
        np.testing.assert_allclose(result.series.v_a, result.series.v_g, atol=1e-6)
        np.testing.assert_allclose(result.series.sigma_dot, 0.0, atol=1e-9)
        assert result.crab_angle == pytest.approx(0.0)

    def test_strict_wind_gate(self, vehicle, segment, crosswind):
        strict = CONFIG.PLANNER.model_copy(update={"strict_wind_gate": True})
        with pytest.raises(errors.WindTooStrong):
            straight_traversal_in_wind(*segment, crosswind, vehicle, settings=strict)

    def test_wind_at_cruise_airspeed(self, vehicle, segment):
        with pytest.raises(errors.WindTooStrong):
            straight_traversal_in_wind(*segment, WindSpec.from_degrees(12.0, 0.0), vehicle)

    def test_segment_too_short(self, vehicle, crosswind):
        settings = CONFIG.PLANNER.model_copy(update={"min_v_gc": 5.0})
        with pytest.raises(errors.InfeasibleSegment):
            straight_traversal_in_wind((0.0, 0.0, -15.0), (0.0, 10.0, -15.0), crosswind, vehicle, settings=settings)

    def test_altitude_change_rejected(self, vehicle, crosswind):
        with pytest.raises(errors.DegenerateSegment):
            straight_traversal_in_wind((0.0, 0.0, -15.0), (0.0, 500.0, -30.0), crosswind, vehicle)

    def test_config_floors(self):
        with pytest.raises(ValueError):
            WindTraversalConfig(v_gc_star=1.0, dt=0.01, min_v_gc=2.0, min_a_g=0.25, initial_a_g_max=2.5, backoff=0.9)

    @pytest.mark.parametrize("wind_heading", [0.0, 180.0, 225.0, 270.0])
    def test_flyable_plans_respect_limits(self, vehicle, segment, wind_heading):
        w = WindSpec.from_degrees(TestData.WIND_SPEED, wind_heading)
        result = straight_traversal_in_wind(*segment, w, vehicle)
        assert result.stf
        s = result.series
        assert np.all(np.abs(s.sigma_dot) <= vehicle.sigma_dot_lim + 1e-9)
        assert np.all((s.a_a >= vehicle.a_lim_minus - 1e-9) & (s.a_a <= vehicle.a_lim_plus + 1e-9))
        assert np.all(s.v_a <= vehicle.v_lim + 1e-9)
        assert np.all(s.v_a >= w.speed * np.abs(np.sin(s.chi - w.heading)) - 1e-9)
        assert sum(result.summary.distances) == pytest.approx(TestData.SEGMENT_LENGTH, rel=1e-3)

    def test_still_air_matches_optimizer_profile(self, vehicle, segment, still_air):
        opt = optimize(TraversalQuery.symmetric(TestData.SEGMENT_LENGTH, 1.5, vehicle))
        assert opt.a_minus == pytest.approx(-opt.a_plus)
        settings = CONFIG.PLANNER.model_copy(update={"initial_a_g_max": opt.a_plus, "cruise_airspeed": opt.v_c})
        result = straight_traversal_in_wind(*segment, still_air, vehicle, settings=settings)
        series, _ = sample_traversal(opt, vehicle, course=np.pi / 2)
        assert result.stf
        assert result.accel.a_g_max == pytest.approx(opt.a_plus)
        assert result.decel.a_g_max == pytest.approx(opt.a_minus)
        assert result.series.t.size == series.t.size
        np.testing.assert_allclose(result.series.t, series.t, atol=1e-9)
        np.testing.assert_allclose(result.series.v_a, series.v_a, atol=1e-6)
        np.testing.assert_allclose(result.series.v_g, series.v_g, atol=1e-6)

    def test_feasibility_band_ends(self, vehicle):
        floors = [0.1, 0.2, 0.3, 0.4, 0.5]
        df = feasibility_band(TestData.WIND_SPEED, TestData.SEGMENT_LENGTH, [-180.0, 0.0, 180.0], floors, vehicle)
        assert len(df) == 15
        tail = df[df["delta_sigma_deg"] == 0.0]
        assert list(tail["min_a_g"]) == floors
        assert not tail["stf"].any()
        assert df.loc[df["delta_sigma_deg"].abs() == 180.0, "stf"].all()

    def test_feasibility_band(self, vehicle):
        deltas = [-10.0, -5.0, 0.0, 5.0, 10.0, 180.0]
        df = feasibility_band(TestData.WIND_SPEED, TestData.SEGMENT_LENGTH, deltas, [0.5, 0.1], vehicle)
        assert list(df.columns) == ["min_a_g", "delta_sigma_deg", "stf"]
        assert len(df) == 12
        assert list(df["min_a_g"].unique()) == [0.1, 0.5]
        infeasible = df.loc[~df["stf"]].groupby("min_a_g").size().reindex([0.1, 0.5], fill_value=0)
        assert infeasible[0.5] >= infeasible[0.1]
        assert df.loc[df["delta_sigma_deg"] == 180.0, "stf"].all()


class TestManeuverPrimitives:
    @pytest.mark.parametrize("course, wind_heading, expected", TestData.HOVER_COURSES)
    def test_initial_hover_course(self, course, wind_heading, expected):
        w = WindSpec.from_degrees(TestData.WIND_SPEED, wind_heading)
        chi = initial_hover_course(np.deg2rad(course), w)
        assert normalize_angle(chi - np.deg2rad(expected)) == pytest.approx(0.0, abs=1e-9)

    def test_not_required_in_still_air(self, still_air):
        with pytest.raises(errors.PrimitiveNotRequired):
            initial_hover_course(np.pi / 2, still_air)

    def test_light_wind_primitive(self, vehicle):
        w = WindSpec.from_degrees(*TestData.LIGHT_WIND_WIND)
        v_gc = ground_speed_for_airspeed(TestData.LIGHT_WIND_AIRSPEED, np.pi / 2, w)
        assert v_gc == pytest.approx(TestData.LIGHT_WIND_GROUND_SPEED, abs=1e-3)
        prim = build_primitive(PrimitiveKind.ACCEL, v_gc, initial_hover_course(np.pi / 2, w), np.pi / 2, 1.0,
                               vehicle.sigma_dot_lim, w, vehicle)
        assert prim.a_g_max == pytest.approx(1.0)
        assert prim.max_heading_rate <= vehicle.sigma_dot_lim * (1 + 1e-9)
        assert prim.part.v_g[-1] == pytest.approx(v_gc)
        assert prim.part.chi[-1] == pytest.approx(np.pi / 2)

    def test_pure_tailwind_keeps_straight_course(self, vehicle, segment):
        w = WindSpec.from_degrees(TestData.WIND_SPEED, 90.0)
        result = plan_with_primitives(*segment, w, vehicle)
        assert normalize_angle(result.cruise_course - np.pi / 2) == pytest.approx(0.0, abs=1e-3)

    def test_near_tailwind_plan(self, vehicle, segment, tailwind):
        result = plan_with_primitives(*segment, tailwind, vehicle)
        assert result.residual < CONFIG.PLANNER.eps
        assert result.v_gc > 12.0
        assert np.rad2deg(np.max(np.abs(result.series.sigma_dot))) <= vehicle.sigma_dot_lim_deg * 1.01
        assert result.series.v_g[0] == pytest.approx(0.0)
        assert result.series.v_g[-1] == pytest.approx(0.0, abs=1e-9)
        s = result.series
        x = trapezoid(s.v_g * np.cos(s.chi), s.t)
        y = trapezoid(s.v_g * np.sin(s.chi), s.t)
        assert x == pytest.approx(0.0, abs=0.5)
        assert y == pytest.approx(TestData.SEGMENT_LENGTH, rel=1e-3)
        assert result.total_energy == pytest.approx(s.energy_cum[-1])

    def test_decel_turn_starts_with_the_primitive(self, vehicle, still_air):
        chi_to = np.pi / 2 + 0.2
        prim = build_primitive(PrimitiveKind.DECEL, 12.0, np.pi / 2, chi_to, 1.0, vehicle.sigma_dot_lim, still_air,
                               vehicle)
        assert prim.course_spline.duration < prim.speed_spline.duration
        turned = prim.part.t >= prim.course_spline.duration
        np.testing.assert_allclose(prim.part.chi[turned], chi_to, atol=1e-9)
        assert prim.part.v_g[turned][0] > 11.0
        assert prim.part.chi[0] == pytest.approx(np.pi / 2)
        assert prim.part.v_g[-1] == 0.0

    def test_decel_speed_waits_for_long_turn(self, vehicle, still_air):
        prim = build_primitive(PrimitiveKind.DECEL, 4.0, np.pi / 2, -np.pi / 2, 1.5, vehicle.sigma_dot_lim, still_air,
                               vehicle)
        delay = prim.duration - prim.speed_spline.duration
        assert delay > 0
        assert prim.duration == pytest.approx(prim.course_spline.duration)
        held = prim.part.t <= delay
        np.testing.assert_allclose(prim.part.v_g[held], 4.0)
        assert prim.part.chi[1] < prim.part.chi[0]
        assert prim.part.v_g[-1] == 0.0
        assert prim.part.chi[-1] == pytest.approx(-np.pi / 2)

    def test_plan_built_for_final_course(self, vehicle, segment, tailwind):
        result = plan_with_primitives(*segment, tailwind, vehicle)
        chi_c = result.cruise_course
        assert result.v_gc == pytest.approx(ground_speed_for_airspeed(CONFIG.PLANNER.cruise_airspeed, chi_c, tailwind),
                                            rel=1e-12)
        assert result.accel.part.chi[-1] == pytest.approx(chi_c, abs=1e-9)
        assert result.decel.part.chi[0] == pytest.approx(chi_c, abs=1e-9)
        assert result.accel.part.v_g[-1] == pytest.approx(result.v_gc)
        assert result.decel.part.v_g[0] == pytest.approx(result.v_gc)
        start = np.asarray(segment[0][:2]) + np.asarray(result.accel.displacement)
        np.testing.assert_allclose(result.cruise_waypoints[0], start, atol=1e-9)

    def test_fixpoint_failure(self, vehicle, segment, tailwind):
        settings = CONFIG.PLANNER.model_copy(update={"max_fixpoint_iterations": 1, "eps": 1e-14})
        with pytest.raises(errors.FixpointFailure) as exc:
            plan_with_primitives(*segment, tailwind, vehicle, settings=settings)
        assert exc.value.residual > 1e-14


class TestBenchmarkAndSweeps:
    def test_mode_benchmark(self, tmp_path):
        df = benchmark_table(load_mission(write_mission(tmp_path, wind={"speed": 4.0, "heading_deg": 0.0})))
        assert list(df.columns) == BENCHMARK_COLUMNS
        assert list(df["scenario"]) == list(TestData.MODE_BENCHMARK)
        for row in df.itertuples(index=False):
            crab, energy, savings = TestData.MODE_BENCHMARK[row.scenario]
            assert row.crab_angle_deg == pytest.approx(crab, abs=0.5), row.scenario
            assert row.energy_j == pytest.approx(energy, rel=TestData.ENERGY_REL_TOL), row.scenario
            assert row.savings_pct == pytest.approx(savings, abs=TestData.SAVINGS_ABS_TOL), row.scenario

    def test_speed_sweep_skips_unreachable_speeds(self, vehicle):
        settings = CONFIG.SWEEP.model_copy(update={"speed_lengths": [10.0, 500.0], "speed_accel": 0.5})
        df = sweep("cruise-speed", vehicle, settings)
        assert set(df["length"]) == {500.0}
        assert (df["l_cruise"] >= 0).all()
        assert df["v_c"].min() == pytest.approx(vehicle.v_qh)

    def test_length_sweep(self, vehicle):
        settings = CONFIG.SWEEP.model_copy(update={"length_values": [250.0, 500.0], "length_accels": [1.0]})
        df = sweep("segment-length", vehicle, settings)
        assert len(df) == 2
        np.testing.assert_allclose(df["v_c"], TestData.BEST_CRUISE_SPEED, atol=1e-3)
        assert (df["energy_j"].diff().dropna() > 0).all()

    def test_short_sweep_names(self, vehicle):
        settings = CONFIG.SWEEP.model_copy(update={"length_values": [250.0], "length_accels": [1.0]})
        pd.testing.assert_frame_equal(sweep("fig10", vehicle, settings), sweep("segment-length", vehicle, settings))

    def test_unknown_sweep(self, vehicle):
        with pytest.raises(ValueError):
            sweep("unknown", vehicle)


class TestCli:
    def test_plan_still_air(self, tmp_path):
        mission = write_mission(tmp_path, "calm")
        out = tmp_path / "out"
        result = CliRunner().invoke(cli, ["plan", "--config", str(mission), "--out-dir", str(out)])
        assert result.exit_code == 0, result.output
        series = pd.read_csv(out / "calm_timeseries.csv")
        assert list(series.columns) == TIMESERIES_COLUMNS
        report = json.loads((out / "calm_report.json").read_text(encoding="utf-8"))
        assert report["verdict"] == "straight"
        assert report["cruise_airspeed"] == pytest.approx(12.0, abs=1e-3)

    def test_plan_crosswind_json(self, tmp_path):
        mission = write_mission(tmp_path, "cross", wind={"speed": 4.0, "heading_deg": 0.0})
        result = CliRunner().invoke(cli, ["plan", "--config", str(mission), "--out-dir", str(tmp_path),
                                          "--format", "json"])
        assert result.exit_code == 0, result.output
        series = json.loads((tmp_path / "cross_timeseries.json").read_text(encoding="utf-8"))
        report = json.loads((tmp_path / "cross_report.json").read_text(encoding="utf-8"))
        assert report["verdict"] == "straight"
        assert report["total_energy"] == pytest.approx(series[-1]["energy_j"], rel=1e-3)

    def test_plan_invalid_mission(self, tmp_path):
        mission = write_mission(tmp_path, "bad", end=[0.0, 500.0, -30.0])
        result = CliRunner().invoke(cli, ["plan", "--config", str(mission), "--out-dir", str(tmp_path)])
        assert result.exit_code == 1
        assert not (tmp_path / "bad_report.json").exists()

    def test_plan_infeasible(self, tmp_path):
        mission = write_mission(tmp_path, "gated", wind={"speed": 4.0, "heading_deg": 0.0},
                                planner={"strict_wind_gate": True})
        result = CliRunner().invoke(cli, ["plan", "--config", str(mission), "--out-dir", str(tmp_path)])
        assert result.exit_code == 2
        report = json.loads((tmp_path / "gated_report.json").read_text(encoding="utf-8"))
        assert report["verdict"] == "infeasible"
        assert report["message"].startswith("WindTooStrong")

    def test_bench_modes(self, tmp_path):
        mission = write_mission(tmp_path, "cross", wind={"speed": 4.0, "heading_deg": 0.0})
        result = CliRunner().invoke(cli, ["bench", "modes", "--config", str(mission), "--out-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "Quad-only" in result.output
        assert list(pd.read_csv(tmp_path / "modes.csv").columns) == BENCHMARK_COLUMNS

    def test_bench_table1_alias(self, tmp_path):
        mission = write_mission(tmp_path, "cross", wind={"speed": 4.0, "heading_deg": 0.0})
        result = CliRunner().invoke(cli, ["bench", "table1", "--config", str(mission), "--out-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "Quad+Hybrid+Plane" in result.output
        assert list(pd.read_csv(tmp_path / "table1.csv").columns) == BENCHMARK_COLUMNS

    def test_bench_surface(self, tmp_path):
        result = CliRunner().invoke(cli, ["bench", "surface", "--out-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "of 110 grid points differ by more than 5%" in result.output
        assert len(pd.read_csv(tmp_path / "surface.csv")) == 110

    def test_sweep_short_names(self, tmp_path):
        result = CliRunner().invoke(cli, ["sweep", "--kind", "fig8", "--out-dir", str(tmp_path / "short")])
        assert result.exit_code == 0, result.output
        result = CliRunner().invoke(cli, ["sweep", "--kind", "cruise-speed", "--out-dir", str(tmp_path / "long")])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "short" / "fig8.csv").read_bytes() == (tmp_path / "long" / "cruise-speed.csv").read_bytes()

    def test_sweep_is_deterministic(self, tmp_path):
        runner = CliRunner()
        for folder in ("a", "b"):
            result = runner.invoke(cli, ["sweep", "--kind", "cruise-speed", "--out-dir", str(tmp_path / folder)])
            assert result.exit_code == 0, result.output
        assert (tmp_path / "a" / "cruise-speed.csv").read_bytes() == (tmp_path / "b" / "cruise-speed.csv").read_bytes()

    def test_export_missions(self, tmp_path, monkeypatch):
        monkeypatch.setattr(PATHS, "user_missions", tmp_path)
        result = CliRunner().invoke(cli, ["export-missions", "--force"])
        assert result.exit_code == 0, result.output
        assert {p.name for p in tmp_path.glob("*.json")} == {"crosswind.json", "no_wind.json", "tailwind.json"}
