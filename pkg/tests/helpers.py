"""Builders shared by the test modules."""

import numpy as np
from imp_isa.executor import MacroExecutor
from imp_isa.neurons import NeuronKind, NeuronModel, ReservedRows, program_reserved_rows
from imp_macro.geometry import Parity, to_bits
from imp_macro.state import MacroState
from imp_mapper.layers import LayerKind, LayerSpec, fc_layer
from imp_runtime.spikes import SpikeTrain

NEURON_KINDS = [NeuronKind.IF, NeuronKind.LIF, NeuronKind.RMP]


def programmed_executor(model: NeuronModel, strict: bool = True) -> MacroExecutor:
    ex = MacroExecutor(MacroState(strict=strict))
    program_reserved_rows(ex, model, ReservedRows())
    return ex


def load_slots(state: MacroState, row: int, values):
    """Stores six slot values into a V row (padded with zeros)."""
    values = list(values) + [0] * (6 - len(values))
    state.store_slot_values(row, values)


def load_weight_row(state: MacroState, row: int, weights):
    """Stores twelve weights (padded with zeros) into a W row, group g = weights[g]."""
    weights = list(weights) + [0] * (12 - len(weights))
    state.w_mem[row] = to_bits(np.asarray(weights), 6).reshape(-1)


def slot_weights(weights12, parity: Parity) -> list:
    """The six weights the slots of a parity receive, in slot order."""
    offset = 0 if Parity(parity) is Parity.ODD else 1
    return [weights12[2 * j + offset] for j in range(6)]


def random_model(rng: np.random.Generator, kind: NeuronKind = None) -> NeuronModel:
    kind = kind if kind is not None else NEURON_KINDS[int(rng.integers(3))]
    return NeuronModel(kind=kind,
                       threshold=int(rng.integers(1, 200)),
                       leak=int(rng.integers(0, 8)) if kind is NeuronKind.LIF else 0,
                       v_reset=int(rng.integers(-20, 20)) if kind is not NeuronKind.RMP else 0)


def random_fc(rng: np.random.Generator, n_in: int, n_out: int, kind: NeuronKind = None) -> LayerSpec:
    return fc_layer(rng.integers(-32, 32, size=(n_in, n_out)), random_model(rng, kind))


def random_conv(rng: np.random.Generator, in_channels: int, in_h: int, in_w: int, out_channels: int,
                kernel: int = 3, stride: int = 1, padding: int = 0, kind: NeuronKind = None) -> LayerSpec:
    fan_in = kernel * kernel * in_channels
    return LayerSpec(kind=LayerKind.CONV, neuron=random_model(rng, kind), in_channels=in_channels, in_h=in_h,
                     in_w=in_w, kernel_h=kernel, kernel_w=kernel, out_channels=out_channels, stride=stride,
                     padding=padding, weights=rng.integers(-32, 32, size=(fan_in, out_channels)).tolist())


def random_train(rng: np.random.Generator, width: int, timesteps: int, sparsity: float) -> SpikeTrain:
    return SpikeTrain({0: rng.random((timesteps, width)) >= sparsity})
