import csv
import json
import numpy as np
import pytest
from imp_cli.commands import EXIT_CAPACITY, EXIT_FAILED, EXIT_IO, EXIT_OK, EXIT_SCHEMA, main, parse_grid
from imp_cli.model_file import load_model_file, parse_model
from imp_messages.errors import ModelSchemaError
from imp_runtime.archive import load_run_events, load_runs
from imp_runtime.spikes import SpikeTrain, write_spike_file


def _fc_layer(rng, n_in, n_out, kind="RMP", threshold=10):
    return {"kind": "FC", "in_dim": n_in, "out_dim": n_out,
            "neuron": {"kind": kind, "threshold": threshold},
            "weights": rng.integers(-32, 32, size=(n_in, n_out)).tolist()}


@pytest.fixture
def model_path(tmp_path):
    rng = np.random.default_rng(0)
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"timesteps": 5, "layers": [_fc_layer(rng, 20, 16), _fc_layer(rng, 16, 4, "IF")]}))
    return str(path)


@pytest.fixture
def spikes_path(tmp_path):
    rng = np.random.default_rng(1)
    path = tmp_path / "in.tsv"
    write_spike_file(str(path), SpikeTrain({0: rng.random((5, 20)) < 0.4}))
    return str(path)


def _write_model(tmp_path, data) -> str:
    path = tmp_path / "bad_model.json"
    path.write_text(json.dumps(data))
    return str(path)


# RUN                                                                                       -   START   -

def test_run_writes_outputs(tmp_path, model_path, spikes_path, capsys):
    out, vmem, report = tmp_path / "out.tsv", tmp_path / "v.csv", tmp_path / "cost.csv"
    code = main(["run", model_path, spikes_path, "-o", str(out), "--vmem-trace", str(vmem), "--report", str(report)])
    assert code == EXIT_OK
    stdout = capsys.readouterr().out
    assert "macros: 3" in stdout
    assert "timesteps: 5" in stdout
    assert "overall sparsity:" in stdout and "cost:" in stdout
    assert out.exists()
    with open(vmem) as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["t", "layer", "neuron", "v_value"]
    assert len(rows) == 1 + 5 * 4
    with open(report) as handle:
        assert next(csv.reader(handle)) == ["kind", "count", "energy_pj", "cycles"]


def test_run_imdb_shaped_model(tmp_path, capsys):
    layers = [{"kind": "FC", "in_dim": n_in, "out_dim": n_out, "neuron": {"kind": "RMP", "threshold": 64}}
              for n_in, n_out in [(100, 128), (128, 128), (128, 1)]]
    spikes = tmp_path / "in.tsv"
    spikes.write_text("0\t0\t7\n1\t0\t99\n")
    code = main(["run", _write_model(tmp_path, {"timesteps": 2, "layers": layers}), str(spikes),
                 "-o", str(tmp_path / "o.tsv")])
    assert code == EXIT_OK
    assert "macros: 23" in capsys.readouterr().out


def test_run_artifacts_are_deterministic(tmp_path, model_path, spikes_path):
    outputs = []
    for k in range(2):
        out, vmem, report = (tmp_path / "{}{}".format(name, k) for name in ("out", "v", "cost"))
        assert main(["run", model_path, spikes_path, "-o", str(out), "--vmem-trace", str(vmem),
                     "--report", str(report)]) == EXIT_OK
        outputs.append([p.read_bytes() for p in (out, vmem, report)])
    assert outputs[0] == outputs[1]


def test_run_with_oracle_check(tmp_path, model_path, spikes_path, capsys):
    code = main(["run", model_path, spikes_path, "-o", str(tmp_path / "o.tsv"), "--oracle-check", "--strict"])
    assert code == EXIT_OK
    assert "oracle: equal" in capsys.readouterr().out


def test_run_traced_neurons(tmp_path, model_path, spikes_path):
    vmem = tmp_path / "v.csv"
    assert main(["run", model_path, spikes_path, "-o", str(tmp_path / "o.tsv"), "--vmem-trace", str(vmem),
                 "--trace-neuron", "1:3", "--trace-neuron", "2:0"]) == EXIT_OK
    rows = vmem.read_text().splitlines()[1:]
    assert [r.split(",")[1:3] for r in rows[:2]] == [["1", "3"], ["2", "0"]]


def test_run_from_another_layer_of_a_spike_file(tmp_path, model_path):
    spikes = tmp_path / "chained.tsv"
    spikes.write_text("0\t3\t1\n2\t3\t19\n0\t0\t5\n")
    out = tmp_path / "o.tsv"
    assert main(["run", model_path, str(spikes), "-o", str(out), "--input-layer", "3", "--timesteps", "3"]) == EXIT_OK


def test_run_archives_to_trace_db(tmp_path, model_path, spikes_path, capsys):
    db = str(tmp_path / "runs.db")
    assert main(["run", model_path, spikes_path, "-o", str(tmp_path / "o.tsv"), "--trace-db", db]) == EXIT_OK
    line = [l for l in capsys.readouterr().out.splitlines() if l.startswith("archived run:")][0]
    run_id = line.split(":", 1)[1].strip()
    (run,) = load_runs(db)
    assert run["run_id"] == run_id
    assert len(load_run_events(db, run_id)) == run["instructions"]


def test_model_energy_table_is_found_next_to_the_model(tmp_path, spikes_path, monkeypatch):
    models = tmp_path / "models"
    models.mkdir()
    (models / "table.json").write_text(json.dumps({"tops_per_w": {"AccW2V": 3.0}}))
    rng = np.random.default_rng(4)
    model = models / "model.json"
    model.write_text(json.dumps({"timesteps": 5, "energy_table": "table.json", "layers": [_fc_layer(rng, 20, 6)]}))
    elsewhere = tmp_path / "elsewhere"
    elsewhere.mkdir()
    monkeypatch.chdir(elsewhere)
    report = tmp_path / "cost.csv"
    assert main(["run", str(model), spikes_path, "-o", str(tmp_path / "o.tsv"), "--report", str(report)]) == EXIT_OK
    with open(report) as handle:
        rows = {row[0]: row for row in csv.reader(handle)}
    assert float(rows["AccW2V"][2]) == pytest.approx(2.0 * int(rows["AccW2V"][1]), abs=1e-3)


def test_malformed_weight_exits_2(tmp_path, spikes_path):
    rng = np.random.default_rng(2)
    layer = _fc_layer(rng, 20, 6)
    layer["weights"][3][5] = 40
    path = _write_model(tmp_path, {"layers": [layer]})
    assert main(["run", path, spikes_path, "-o", str(tmp_path / "o.tsv")]) == EXIT_SCHEMA


def test_missing_files_exit_4(tmp_path, model_path, spikes_path):
    assert main(["run", str(tmp_path / "nope.json"), spikes_path]) == EXIT_IO
    assert main(["run", model_path, str(tmp_path / "nope.tsv"), "-o", str(tmp_path / "o.tsv")]) == EXIT_IO


def test_oversized_conv_exits_3(tmp_path, spikes_path):
    conv = {"kind": "Conv", "in_channels": 15, "in_h": 5, "in_w": 5, "kernel_h": 3, "kernel_w": 3,
            "out_channels": 4, "neuron": {"threshold": 8}}
    path = _write_model(tmp_path, {"layers": [conv]})
    assert main(["run", path, spikes_path, "-o", str(tmp_path / "o.tsv")]) == EXIT_CAPACITY
    assert main(["map", path]) == EXIT_CAPACITY


def test_width_mismatch_in_spike_file_exits_2(tmp_path, model_path):
    spikes = tmp_path / "wide.tsv"
    spikes.write_text("0\t0\t25\n")
    assert main(["run", model_path, str(spikes), "-o", str(tmp_path / "o.tsv")]) == EXIT_SCHEMA


def test_oracle_divergence_exits_1(tmp_path, model_path, spikes_path, monkeypatch):
    from imp_cli import commands
    from imp_oracle.reference import Comparison, Divergence
    monkeypatch.setattr(commands, "compare", lambda sim, ref: Comparison(Divergence(0, 1, 0, "spike", 1, 0)))
    assert main(["run", model_path, spikes_path, "-o", str(tmp_path / "o.tsv"), "--oracle-check"]) == EXIT_FAILED

# RUN                                                                                       -   ENDED   -


# MODEL FILE                                                                                -   START   -

def test_field_path_of_bad_weight():
    layer = _fc_layer(np.random.default_rng(3), 4, 6)
    layer["weights"][3][5] = 40
    with pytest.raises(ModelSchemaError) as err:
        parse_model({"layers": [layer]})
    assert err.value.field_path == "layers.0.weights.3.5"


def test_flat_neuron_keys():
    layer = {"kind": "FC", "in_dim": 2, "out_dim": 2, "neuron_kind": "LIF", "threshold": 5, "leak": 1}
    model = parse_model({"layers": [layer]})
    assert model.layers[0].neuron.kind.value == "LIF"
    assert model.layers[0].neuron.leak == 1


@pytest.mark.parametrize("data", [
    {"layers": []},
    {"layers": [{"kind": "FC", "in_dim": 2, "out_dim": 3, "neuron": {"threshold": 1}},
                {"kind": "FC", "in_dim": 4, "out_dim": 1, "neuron": {"threshold": 1}}]},
    {"layers": [{"kind": "FC", "in_dim": 2, "out_dim": 3, "neuron": {"threshold": 1}}], "timesteps": 0},
])
def test_invalid_models(data):
    with pytest.raises(ModelSchemaError):
        parse_model(data)


def test_not_json(tmp_path):
    path = tmp_path / "m.json"
    path.write_text("{")
    with pytest.raises(ModelSchemaError):
        load_model_file(str(path))

# MODEL FILE                                                                                -   ENDED   -


# SWEEP, MAP, SELFTEST                                                                      -   START   -

def test_sweep_prints_default_grid(capsys):
    assert main(["sweep"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "sparsity,edp_pj_ns,reduction_pct"
    assert len(lines) == 7


def test_sweep_reduction_at(capsys):
    assert main(["sweep", "--grid", "0", "--at", "0.85"]) == EXIT_OK
    line = capsys.readouterr().out.splitlines()[-1]
    assert line.startswith("reduction at 0.85: ")
    assert float(line.split(": ")[1].rstrip("%")) == pytest.approx(97.4, abs=1.0)
    main(["sweep", "--grid", "0.5", "--at", "0"])
    assert capsys.readouterr().out.splitlines()[-1] == "reduction at 0.00: 0.00%"


def test_sweep_to_file(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--grid", "0,0.5,1", "--out", str(out)]) == EXIT_OK
    assert len(out.read_text().splitlines()) == 4
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("grid", ["", "0,1.5"])
def test_sweep_bad_grid_exits_2(grid):
    assert main(["sweep", "--grid", grid]) == EXIT_SCHEMA


def test_parse_grid():
    assert parse_grid("0, 0.25,1") == [0.0, 0.25, 1.0]
    with pytest.raises(ValueError):
        parse_grid(" , ")


def test_map_report(tmp_path, capsys):
    data = {"layers": [{"kind": "FC", "in_dim": 128, "out_dim": 128, "neuron": {"threshold": 8}}]}
    assert main(["map", _write_model(tmp_path, data)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "11 macros" in out
    assert "total: 11 macros" in out


@pytest.mark.slow
def test_selftest(capsys):
    assert main(["selftest"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "adder: 0 mismatch(es)" in out
    assert "comparator: 0 mismatch(es)" in out

# SWEEP, MAP, SELFTEST                                                                      -   ENDED   -
