import csv
from collections import Counter
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from imp_isa.neurons import INSTRUCTIONS_PER_UPDATE, NeuronKind, NeuronModel
from imp_mapper.layers import fc_layer
from imp_messages.errors import MappingViolationError, ShapeMismatchError
from imp_oracle.reference import RefNetwork, compare, ref_run
from imp_runtime.engine import compile_network, run_inference, run_timestep
from imp_runtime.spikes import (RunStats, SpikeTrain, compute_sparsity, read_spike_file, write_spike_file,
                                write_vtrace_csv)
from tests.helpers import random_conv, random_fc, random_train


def _kinds(trace) -> Counter:
    return Counter(e.kind for e in trace)


# TIMESTEP                                                                                  -   START   -

def test_silent_input_issues_only_neuron_updates():
    network = compile_network([random_fc(np.random.default_rng(0), 20, 12, NeuronKind.IF)])
    out = run_timestep(network.engines[0], np.zeros(20, dtype=bool))
    assert not out.any()
    assert _kinds(network.trace) == Counter({"SpikeCheck": 2, "ResetV": 2})


@settings(max_examples=30, deadline=None)
@given(k=st.integers(0, 128), kind=st.sampled_from(list(NeuronKind)), seed=st.integers(0, 1000))
def test_instruction_count_contract(k, kind, seed):
    rng = np.random.default_rng(seed)
    network = compile_network([random_fc(rng, 128, 12, kind)])
    spikes = np.zeros(128, dtype=bool)
    spikes[rng.choice(128, size=k, replace=False)] = True
    run_timestep(network.engines[0], spikes)
    kinds = _kinds(network.trace)
    assert kinds["AccW2V"] == 2 * k
    assert len(network.trace) == 2 * k + INSTRUCTIONS_PER_UPDATE[kind]


def test_accw2v_rows_follow_ascending_inputs():
    network = compile_network([random_fc(np.random.default_rng(1), 16, 4)])
    spikes = np.zeros(16, dtype=bool)
    spikes[[9, 2, 5]] = True
    run_timestep(network.engines[0], spikes, t=3)
    acc = [(e.w_row, e.parity) for e in network.trace if e.kind == "AccW2V"]
    assert acc == [(2, "odd"), (2, "even"), (5, "odd"), (5, "even"), (9, "odd"), (9, "even")]
    assert all(e.timestep == 3 and e.layer == 1 for e in network.trace)


def test_single_spike_fires_all_twelve():
    network = compile_network([fc_layer(np.ones((4, 12), dtype=int), NeuronModel(kind=NeuronKind.IF, threshold=1))])
    engine = network.engines[0]
    out = engine.run_timestep(np.array([0, 1, 0, 0]), 0)
    assert out.all()
    assert not engine.vmem_vector().any()


def test_width_mismatch():
    network = compile_network([random_fc(np.random.default_rng(2), 8, 3)])
    with pytest.raises(ShapeMismatchError):
        network.engines[0].run_timestep(np.zeros(9, dtype=bool), 0)


def test_removing_spikes_never_adds_accw2v():
    rng = np.random.default_rng(4)
    layer = random_fc(rng, 64, 12)
    spikes = rng.random(64) < 0.4
    fewer = spikes & (rng.random(64) < 0.5)
    counts = []
    for s in (spikes, fewer):
        network = compile_network([layer])
        network.engines[0].run_timestep(s, 0)
        counts.append(_kinds(network.trace)["AccW2V"])
    assert counts[1] <= counts[0]


def test_input_tiled_merge_in_trace():
    rng = np.random.default_rng(5)
    network = compile_network([random_fc(rng, 200, 12)], strict=True)
    spikes = np.zeros(200, dtype=bool)
    spikes[[3, 150]] = True
    network.engines[0].run_timestep(spikes, 0)
    kinds = _kinds(network.trace)
    assert kinds["AccW2V"] == 4
    # per parity: donor read, owner write, merge add, donor clear
    assert kinds["Read"] == 2 and kinds["Write"] == 4
    assert kinds["AccV2V"] >= 2


def test_donor_without_spikes_is_not_merged():
    network = compile_network([random_fc(np.random.default_rng(6), 200, 12)])
    spikes = np.zeros(200, dtype=bool)
    spikes[3] = True
    network.engines[0].run_timestep(spikes, 0)
    assert "Read" not in _kinds(network.trace)


def test_conv_multiplexing_swaps_contexts():
    rng = np.random.default_rng(7)
    layer = random_conv(rng, 1, 7, 7, 3, kind=NeuronKind.RMP)
    network = compile_network([layer], strict=True)
    network.engines[0].run_timestep(np.zeros(49, dtype=bool), 0)
    kinds = _kinds(network.trace)
    assert kinds["Write"] == 2 * 25
    assert kinds["Read"] == 2 * 25
    assert kinds["SpikeCheck"] == 2 * 25

# TIMESTEP                                                                                  -   ENDED   -


# INFERENCE                                                                                 -   START   -

def test_one_timestep_inference_equals_run_timestep():
    rng = np.random.default_rng(8)
    layers = [random_fc(rng, 30, 20), random_fc(rng, 20, 5)]
    x = rng.random(30) < 0.5
    result = run_inference(compile_network(layers), SpikeTrain({0: x[None, :]}))
    network = compile_network(layers)
    h = run_timestep(network.engines[0], x)
    y = run_timestep(network.engines[1], h)
    assert np.array_equal(result.spikes.at(0, 1), h)
    assert np.array_equal(result.spikes.at(0, 2), y)
    assert [(e.kind, e.w_row) for e in result.trace] == [(e.kind, e.w_row) for e in network.trace]


def test_rmp_sawtooth_trace():
    model = NeuronModel(kind=NeuronKind.RMP, threshold=7)
    network = compile_network([fc_layer([[3]], model)])
    result = run_inference(network, SpikeTrain({0: np.ones((8, 1), dtype=bool)}))
    assert [row[3] for row in result.vtrace] == [3, 6, 2, 5, 1, 4, 0, 3]
    assert list(np.flatnonzero(result.spikes.spikes[1][:, 0])) == [2, 4, 6]


def test_trace_is_deterministic():
    rng = np.random.default_rng(9)
    layers = [random_fc(rng, 40, 24), random_fc(rng, 24, 3)]
    train = random_train(rng, 40, 5, 0.7)
    a = run_inference(compile_network(layers), train)
    b = run_inference(compile_network(layers), train)
    assert a.trace == b.trace
    assert np.array_equal(a.final_v[2], b.final_v[2])


def test_run_stats_and_trace_neurons():
    rng = np.random.default_rng(10)
    layers = [random_fc(rng, 16, 8), random_fc(rng, 8, 2)]
    train = random_train(rng, 16, 4, 0.5)
    result = run_inference(compile_network(layers), train, trace_neurons=[(1, 3)])
    assert [row[:3] for row in result.vtrace] == [(t, 1, 3) for t in range(4)]
    assert sorted(result.stats.spike_counts) == [0, 1, 2]
    assert result.stats.spike_counts[0] == [int(train.at(t, 0).sum()) for t in range(4)]
    assert sum(result.stats.instruction_counts.values()) == len(result.trace)


def test_unmapped_network():
    with pytest.raises(MappingViolationError):
        run_inference(compile_network([]), SpikeTrain({0: np.zeros((1, 4), dtype=bool)}))


def test_inference_rejects_bad_input():
    network = compile_network([random_fc(np.random.default_rng(11), 5, 2)])
    with pytest.raises(ShapeMismatchError):
        run_inference(network, SpikeTrain({0: np.zeros((2, 6), dtype=bool)}))
    with pytest.raises(ShapeMismatchError):
        run_inference(network, SpikeTrain({0: np.zeros((2, 5), dtype=bool)}), trace_neurons=[(2, 0)])


@pytest.mark.parametrize("saturate", [False, True])
def test_conv_then_fc_matches_reference(saturate):
    rng = np.random.default_rng(12)
    conv = random_conv(rng, 2, 5, 5, 5, kernel=3, stride=1, padding=1)
    layers = [conv, random_fc(rng, conv.output_width, 7)]
    train = random_train(rng, conv.input_width, 6, 0.6)
    result = run_inference(compile_network(layers, strict=True, saturate=saturate), train)
    assert compare(result, ref_run(RefNetwork.from_specs(layers, saturate), train)).equal

# INFERENCE                                                                                 -   ENDED   -


# SPARSITY AND FILES                                                                        -   START   -

def _stats(counts, width):
    stats = RunStats()
    for t, c in enumerate(counts):
        spikes = np.zeros(width, dtype=bool)
        spikes[:c] = True
        stats.record_spikes(0, t, spikes)
    return stats


def test_sparsity_extremes():
    assert compute_sparsity(_stats([0, 0], 10)).overall == 1.0
    assert compute_sparsity(_stats([10, 10], 10)).overall == 0.0


def test_sparsity_of_19_in_128():
    table = compute_sparsity(_stats([19], 128))
    assert table.per_layer[0][0] == pytest.approx(0.8516, abs=1e-4)
    assert table.layer_mean(0) == pytest.approx(0.8516, abs=1e-4)


def test_spike_file_roundtrip(tmp_path):
    rng = np.random.default_rng(13)
    train = SpikeTrain({0: rng.random((5, 9)) < 0.3, 1: rng.random((5, 4)) < 0.3})
    path = tmp_path / "spikes.tsv"
    write_spike_file(str(path), train)
    back = read_spike_file(str(path), {0: 9, 1: 4}, 5)
    assert np.array_equal(back.spikes[0], train.spikes[0])
    assert np.array_equal(back.spikes[1], train.spikes[1])
    first = path.read_text().splitlines()[0].split("\t")
    assert len(first) == 3


def test_spike_file_keeps_requested_layers(tmp_path):
    path = tmp_path / "spikes.tsv"
    path.write_text("# t layer neuron\n0\t0\t2\n1\t3\t1\n\n2\t0\t0\n")
    train = read_spike_file(str(path), {0: 3}, 3)
    assert train.layers == [0]
    assert train.events() == [(0, 0, 2), (2, 0, 0)]


@pytest.mark.parametrize("content", ["0\t0\n", "0\t0\tx\n", "0\t0\t7\n", "9\t0\t0\n"])
def test_spike_file_rejects(tmp_path, content):
    path = tmp_path / "bad.tsv"
    path.write_text(content)
    with pytest.raises(ShapeMismatchError):
        read_spike_file(str(path), {0: 3}, 3)


def test_spike_train_rejects_non_binary():
    with pytest.raises(ShapeMismatchError):
        SpikeTrain({0: np.array([[0, 2]])})


def test_vtrace_csv(tmp_path):
    path = tmp_path / "v.csv"
    write_vtrace_csv(str(path), [(0, 1, 0, -5), (1, 1, 0, 7)])
    with open(path) as handle:
        rows = list(csv.reader(handle))
    assert rows == [["t", "layer", "neuron", "v_value"], ["0", "1", "0", "-5"], ["1", "1", "0", "7"]]

# SPARSITY AND FILES                                                                        -   ENDED   -
