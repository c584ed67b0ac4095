import csv
import json
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from imp_config import conf
from imp_energy.accounting import account, neuron_update_cost, write_cost_csv
from imp_energy.sweep import DEFAULT_GRID, edp_sweep, spiking_inputs, write_sweep_csv
from imp_energy.table import (EnergyTable, default_table, load_energy_table, resolve_energy_table,
                              table_from_dict)
from imp_isa.neurons import NeuronKind
from imp_messages.errors import ModelSchemaError, UnknownInstructionError
from imp_runtime.engine import compile_network
from tests.helpers import random_fc

KINDS = ["AccW2V", "AccV2V", "ResetV", "SpikeCheck", "Read", "Write"]


# TABLE                                                                                     -   START   -

@pytest.mark.parametrize("kind, energy, eff", [
    ("AccW2V", 6.0606, 0.99),
    ("AccV2V", 5.0847, 1.18),
    ("ResetV", 5.8824, 1.02),
    ("SpikeCheck", 4.9180, 1.22),
])
def test_default_energies(kind, energy, eff):
    table = default_table()
    assert table.cost(kind).energy_pj == pytest.approx(energy, abs=1e-4)
    assert table.tops_per_w(kind) == pytest.approx(eff, abs=0.01)
    assert table.cost(kind).cycles == 1


def test_host_moves_are_free_by_default():
    table = default_table()
    assert table.cost("Read").energy_pj == 0.0
    assert table.tops_per_w("Write") == 0.0
    assert table.clock_period_ns == pytest.approx(5.0)


def test_unknown_kind():
    with pytest.raises(UnknownInstructionError):
        default_table().cost("Mul")


def test_short_form_table():
    table = table_from_dict({"tops_per_w": {"AccW2V": 2.0}, "clock_mhz": 100, "host_energy_pj": {"Read": 1.5}})
    assert table.clock_period_ns == pytest.approx(10.0)
    assert table.cost("AccW2V").energy_pj == pytest.approx(3.0)
    assert table.cost("Read").energy_pj == 1.5


def test_full_table_dump_is_accepted():
    table = default_table()
    assert table_from_dict(table.model_dump()) == table


@pytest.mark.parametrize("data", [
    {"tops_per_w": {"AccW2V": 0}},
    {"tops_per_w": {"AccW2V": 1.0}, "clock_mhz": -5},
    {"costs": {"AccW2V": {"energy_pj": -1.0}}},
    {"clock_period_ns": 5.0},
])
def test_invalid_tables(data):
    with pytest.raises(ModelSchemaError):
        table_from_dict(data)


def test_load_energy_table(tmp_path):
    path = tmp_path / "table.json"
    path.write_text(json.dumps({"tops_per_w": {"AccW2V": 1.0, "SpikeCheck": 1.5}}))
    assert load_energy_table(str(path)).cost("SpikeCheck").energy_pj == pytest.approx(4.0)
    path.write_text("{not json")
    with pytest.raises(ModelSchemaError):
        load_energy_table(str(path))
    path.write_text("[1, 2]")
    with pytest.raises(ModelSchemaError):
        load_energy_table(str(path))


def test_resolve_energy_table(tmp_path, monkeypatch):
    path = tmp_path / "env_table.json"
    path.write_text(json.dumps({"tops_per_w": {"AccW2V": 3.0}}))
    monkeypatch.setattr(conf, "ENERGY_TABLE_PATH", None)
    assert resolve_energy_table() == default_table()
    monkeypatch.setattr(conf, "ENERGY_TABLE_PATH", str(path))
    assert resolve_energy_table().cost("AccW2V").energy_pj == pytest.approx(2.0)
    inline = resolve_energy_table({"tops_per_w": {"AccW2V": 6.0}})
    assert inline.cost("AccW2V").energy_pj == pytest.approx(1.0)


def test_relative_table_path_follows_base_dir(tmp_path, monkeypatch):
    (tmp_path / "models").mkdir()
    (tmp_path / "models" / "table.json").write_text(json.dumps({"tops_per_w": {"AccW2V": 3.0}}))
    monkeypatch.chdir(tmp_path)
    table = resolve_energy_table("table.json", base_dir=str(tmp_path / "models"))
    assert table.cost("AccW2V").energy_pj == pytest.approx(2.0)
    absolute = resolve_energy_table(str(tmp_path / "models" / "table.json"), base_dir="/nowhere")
    assert absolute == table

# TABLE                                                                                     -   ENDED   -


# ACCOUNTING                                                                                -   START   -

def test_empty_trace_costs_nothing():
    report = account([])
    assert (report.count, report.energy_pj, report.delay_ns, report.edp) == (0, 0.0, 0.0, 0.0)
    assert report.tops_per_w == 0.0 and report.average_power_mw == 0.0


@pytest.mark.parametrize("kind, eff", [("AccW2V", 0.99), ("AccV2V", 1.18), ("ResetV", 1.02), ("SpikeCheck", 1.22)])
def test_report_efficiency_per_kind(kind, eff):
    assert account([kind] * 10).tops_per_w == pytest.approx(eff, abs=0.01)


def test_delay_is_cycles_times_period():
    report = account(["AccW2V"] * 3 + ["Read"])
    assert report.cycles == 4
    assert report.delay_ns == pytest.approx(20.0)
    assert report.average_power_mw == pytest.approx(report.energy_pj / 20.0)


@settings(max_examples=50)
@given(a=st.lists(st.sampled_from(KINDS), max_size=40), b=st.lists(st.sampled_from(KINDS), max_size=40))
def test_accounting_is_additive_and_order_free(a, b):
    whole = account(a + b)
    assert whole.energy_pj == pytest.approx(account(a).energy_pj + account(b).energy_pj)
    assert whole.delay_ns == pytest.approx(account(a).delay_ns + account(b).delay_ns)
    assert account(list(reversed(a + b))).energy_pj == pytest.approx(whole.energy_pj)


def test_account_of_simulator_trace():
    network = compile_network([random_fc(np.random.default_rng(0), 32, 12, NeuronKind.IF)])
    spikes = np.zeros(32, dtype=bool)
    spikes[:5] = True
    network.engines[0].run_timestep(spikes, 0)
    report = account(network.trace)
    assert report.per_kind["AccW2V"].count == 10
    assert report.count == 14
    assert report.delay_ns == pytest.approx(70.0)
    assert "14 instructions" in report.summary()


@pytest.mark.parametrize("kind, energy, delay", [
    (NeuronKind.IF, 2 * (4.9180 + 5.8824), 20.0),
    (NeuronKind.LIF, 2 * (5.0847 + 4.9180 + 5.8824), 30.0),
    (NeuronKind.RMP, 2 * (4.9180 + 5.0847), 20.0),
])
def test_neuron_update_cost(kind, energy, delay):
    cost = neuron_update_cost(default_table(), kind)
    assert cost["energy_pj"] == pytest.approx(energy, abs=1e-3)
    assert cost["delay_ns"] == pytest.approx(delay)
    assert cost["edp_per_neuron"] == pytest.approx(energy * delay / 12, abs=1e-2)


def test_write_cost_csv(tmp_path):
    path = tmp_path / "cost.csv"
    write_cost_csv(str(path), account(["SpikeCheck", "AccW2V", "AccW2V"]))
    with open(path) as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["kind", "count", "energy_pj", "cycles"]
    assert rows[1] == ["AccW2V", "2", "12.1212", "2"]
    assert rows[2] == ["SpikeCheck", "1", "4.9180", "1"]
    assert rows[-1] == ["total", "3", "17.0392", "3"]

# ACCOUNTING                                                                                -   ENDED   -


# SWEEP                                                                                     -   START   -

def test_spiking_inputs():
    assert spiking_inputs(0.85) == 19
    assert spiking_inputs(0.0) == 128
    assert spiking_inputs(1.0) == 0


def test_sweep_reduction_at_85_percent():
    curve = edp_sweep([0.0, 0.85])
    assert curve[0].reduction_pct == pytest.approx(0.0)
    assert curve[1].reduction_pct == pytest.approx(97.4, abs=1.0)
    assert curve[1].energy_pj == pytest.approx(251.9, abs=0.5)
    assert curve[1].delay_ns == pytest.approx(210.0)


def test_sweep_is_monotone():
    curve = edp_sweep(DEFAULT_GRID)
    edps = [p.edp_per_neuron for p in curve]
    assert all(a > b for a, b in zip(edps, edps[1:]))
    assert curve[-1].spikes == 0


def test_sweep_does_not_depend_on_seed():
    assert [p.edp_per_neuron for p in edp_sweep(seed=1)] == [p.edp_per_neuron for p in edp_sweep(seed=2)]


@pytest.mark.parametrize("points", [[], [1.5], [-0.1, 0.5]])
def test_sweep_rejects_grid(points):
    with pytest.raises(ValueError):
        edp_sweep(points)


def test_sweep_with_custom_table():
    table = EnergyTable.from_efficiencies({k: 1.0 for k in ("AccW2V", "AccV2V", "ResetV", "SpikeCheck")})
    (point,) = edp_sweep([1.0], table=table)
    assert point.energy_pj == pytest.approx(24.0)


def test_write_sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    write_sweep_csv(str(path), edp_sweep([0.0, 0.5]))
    lines = path.read_text().splitlines()
    assert lines[0] == "sparsity,edp_pj_ns,reduction_pct"
    assert lines[1].startswith("0.0000,") and lines[1].endswith(",0.0000")
    assert len(lines) == 3

# SWEEP                                                                                     -   ENDED   -
