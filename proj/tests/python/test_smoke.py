"""Smoke tests for the python bindings (install with `pip install .`)."""

import json
import math

import pytest

import tempsense as tsn


def test_version():
    assert tsn.__version__


def test_time_helpers_round_trip():
    t = tsn.parse_time("2024-01-01T12:30:00Z")
    assert tsn.format_time(t) == "2024-01-01T12:30:00Z"
    assert tsn.parse_time("2024-01-01T13:30:00+01:00") == t


def test_fan_affinity_and_pue():
    assert tsn.fan_power(2.0, 1.0) == pytest.approx(8.0, abs=1e-12)
    assert tsn.fan_power(1.1, 1.0) == pytest.approx(1.331, abs=1e-12)
    assert tsn.pue(800.0, 200.0) == pytest.approx(1.25)
    with pytest.raises(ValueError):
        tsn.pue(0.0, 10.0)


def test_physics_breakdown_sums():
    plant = tsn.PlantConfig()
    b = tsn.building_power(24.0, 100.0, 30.0, plant)
    assert b.total_kw == b.compute_kw + b.fans_kw + b.cooling_kw + b.overhead_kw
    assert b.pue > 1.0
    assert b.mode == tsn.CoolingMode.chiller
    assert tsn.cooling_power(100.0, 24.0, 10.0, plant) == (pytest.approx(3.0), tsn.CoolingMode.economizer)


def test_plant_config_json_round_trip():
    plant = tsn.PlantConfig()
    plant.fan.reference_fan_fraction = 0.05
    text = plant.to_json()
    again = tsn.PlantConfig.from_json(text)
    assert again.fan.reference_fan_fraction == 0.05
    assert json.loads(text)["chiller"]["reference_cop"] == 4.0


def test_correlate():
    c = tsn.correlate([1.0, 2.0, 3.0, 4.0], [1.0, 3.0, 2.0, 4.0])
    assert c.pearson_r == pytest.approx(0.8)
    assert c.spearman_rho == pytest.approx(0.8)
    assert c.pearson_p == pytest.approx(0.2)
    with pytest.raises(tsn.DataError):
        tsn.correlate([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])


def test_simulate_detect_analyze_round_trip():
    scenario = tsn.Scenario.from_json(json.dumps({
        "rooms": [{
            "room_id": "lab",
            "base_compute_kw": 150.0,
            "schedule": [
                {"time": "2024-01-01T00:00:00Z", "inlet_c": 24.0},
                {"time": "2024-01-09T12:00:00Z", "inlet_c": 26.0},
            ],
        }],
        "load": {"daily_amplitude": 0.0, "weekend_ratio": 1.0, "noise_sigma": 0.002},
        "outdoor": {"mean_c": 30.0, "seasonal_amplitude_c": 0.0, "diurnal_amplitude_c": 0.0},
        # without the chiller COP gain the building-level effect of a raise
        # is unambiguously positive, like the room-level one
        "plant": {"chiller": {"cop_gain_per_degc": 0.0}},
        "start": "2024-01-01T00:00:00Z",
        "end": "2024-01-17T00:00:00Z",
        "grid_interval_seconds": 60,
        "seed": 5,
        "sensor_noise_sigma_c": 0.02,
    }))
    out = tsn.simulate(scenario)
    assert len(out.rooms) == 1

    events = tsn.detect_changes(out.rooms[0])
    assert len(events) == 1
    assert events[0].magnitude_c == pytest.approx(2.0, abs=0.1)

    target = tsn.analytic_sensitivity(scenario.plant, 25.0, tsn.SensitivityLevel.room)
    res = tsn.window_analysis(out.rooms[0], events[0], 3600)
    assert res.sensitivity_rel_pct_per_c == pytest.approx(target, abs=0.05)
    assert res.pearson_r > 0.9

    mc = tsn.matched_window_analysis(out.building_power, events[0], 4, 3, 3600)
    assert mc.significant
    assert mc.relative_change_pct > 0

    batch = tsn.batch_analysis(out.rooms, tsn.DetectorConfig(), [3600, 7200])
    assert len(batch.results) == 2
    summary = tsn.summarize_batch(batch.results)
    assert summary.n_results == 2
    assert summary.mean_sensitivity == pytest.approx(target, abs=0.1)


def test_determinism():
    text = json.dumps({
        "rooms": [{"room_id": "a", "base_compute_kw": 100.0,
                   "schedule": [{"time": "2024-01-01T00:00:00Z", "inlet_c": 24.0}]}],
        "load": {"noise_sigma": 0.01},
        "start": "2024-01-01T00:00:00Z",
        "end": "2024-01-02T00:00:00Z",
        "grid_interval_seconds": 300,
        "seed": 9,
    })
    a = tsn.simulate(tsn.Scenario.from_json(text))
    b = tsn.simulate(tsn.Scenario.from_json(text))
    assert [p.power_kw for p in a.rooms[0].points] == [p.power_kw for p in b.rooms[0].points]


def test_sweet_spot():
    plant = tsn.PlantConfig()
    profile = tsn.reference_year_profile(100.0)
    res = tsn.find_sweet_spot(plant, profile, 18.0, 32.0, 0.05)
    assert 25.0 <= res.optimal_t_c <= 28.0
    assert not res.truncated
    # the curve endpoints are worse than the optimum
    curve = tsn.sweep_temperature(plant, profile, 18.0, 32.0, 1.0)
    assert curve[0].mean_total_kw > res.optimal_power_kw
    assert curve[-1].mean_total_kw > res.optimal_power_kw
    assert curve[-1].economizer_share > curve[0].economizer_share
