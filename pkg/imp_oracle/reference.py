"""=== Reference SNN ================================================================================================
Plain integer inference over dense weight matrices: no arrays, bitlines or adders. Used as ground truth for the macro
simulation, so nothing in here imports imp_macro.

    accumulate : V <- V + W^T s       (mod 2^11, or clamped add by add in ascending input order when saturating;
                                       FC inputs beyond 128 rows clamp per row tile, merged in tile order)
    LIF        : V <- V - leak        (before the threshold test)
    spike      : (V - theta) >= 0     (the difference wraps / clamps like every other add)
    IF, LIF    : V <- v_reset         where spiking
    RMP        : V <- V - theta       where spiking
==================================================================================================================="""

import logging
import inspect
from typing import Optional
import numpy as np
from imp_isa.neurons import NeuronKind, NeuronModel
from imp_mapper.layers import LayerKind, LayerSpec
from imp_messages.errors import ShapeMismatchError
from imp_runtime.spikes import SpikeTrain

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -

V_BITS = 11
V_MIN = -(1 << (V_BITS - 1))
V_MAX = (1 << (V_BITS - 1)) - 1
INPUT_TILE_ROWS = 128


def _wrap(values: np.ndarray) -> np.ndarray:
    return ((values - V_MIN) % (1 << V_BITS)) + V_MIN


def _clamp(values: np.ndarray) -> np.ndarray:
    return np.clip(values, V_MIN, V_MAX)


def dense_matrix(layer: LayerSpec) -> np.ndarray:
    """(input_width, output_width) integer matrix of a layer; Conv layers are unrolled over the output positions."""
    weights = layer.weight_matrix()
    if layer.kind is LayerKind.FC:
        return weights.copy()
    s = layer
    matrix = np.zeros((s.input_width, s.output_width), dtype=np.int64)
    for oy in range(s.out_h):
        for ox in range(s.out_w):
            out_base = (oy * s.out_w + ox) * s.out_channels
            for ky in range(s.kernel_h):
                for kx in range(s.kernel_w):
                    iy, ix = oy * s.stride + ky - s.padding, ox * s.stride + kx - s.padding
                    if not (0 <= iy < s.in_h and 0 <= ix < s.in_w):
                        continue
                    for c in range(s.in_channels):
                        tap = (ky * s.kernel_w + kx) * s.in_channels + c
                        matrix[(iy * s.in_w + ix) * s.in_channels + c,
                               out_base:out_base + s.out_channels] = weights[tap]
    return matrix


class RefLayer:
    """Dense layer. Saturating adds clamp within row tiles of tile_rows inputs; one tile if None."""
    def __init__(self, matrix: np.ndarray, neuron: NeuronModel, tile_rows: Optional[int] = None):
        self.matrix: np.ndarray     = np.asarray(matrix, dtype=np.int64)
        self.neuron: NeuronModel    = neuron
        self.tile_rows: int         = tile_rows or max(self.matrix.shape[0], 1)
        self.v: np.ndarray          = np.zeros(self.matrix.shape[1], dtype=np.int64)

    @property
    def input_width(self) -> int:
        return self.matrix.shape[0]

    @property
    def width(self) -> int:
        return self.matrix.shape[1]


class RefNetwork:
    """=== Class name: RefNetwork =====================================================================================
    Layers with their membrane state. saturate switches every add from wraparound to clamping, the same switch the
    macro state carries.
    ==================================================================================================================="""
    ccn = inspect.currentframe().f_code.co_name  # current class name

    def __init__(self, layers: list, saturate: bool = False):
        self.layers: list       = layers
        self.saturate: bool     = saturate
        for prev, nxt in zip(layers, layers[1:]):
            if prev.width != nxt.input_width:
                raise ShapeMismatchError("layer widths do not chain: {} -> {}".format(prev.width, nxt.input_width))
        lg.debug("init.ed   : {} reference layer(s), saturate={} - says {}".format(len(layers), saturate, self.ccn))

    @classmethod
    def from_specs(cls, specs: list, saturate: bool = False) -> "RefNetwork":
        return cls([RefLayer(dense_matrix(s), s.neuron, INPUT_TILE_ROWS if s.kind is LayerKind.FC else None)
                    for s in specs], saturate)

    def reset(self):
        for layer in self.layers:
            layer.v[:] = 0

    def add(self, a: np.ndarray, b) -> np.ndarray:
        return _clamp(a + b) if self.saturate else _wrap(a + b)


def _accumulate(network: RefNetwork, layer: RefLayer, spikes: np.ndarray):
    active = np.flatnonzero(spikes)
    if not network.saturate:
        layer.v = _wrap(layer.v + layer.matrix[active].sum(axis=0))
        return
    # first tile adds straight into V; every later tile clamps its own partial, then merges
    tiles = active // layer.tile_rows
    for i in active[tiles == 0]:
        layer.v = _clamp(layer.v + layer.matrix[i])
    for tile in np.unique(tiles[tiles > 0]):
        partial = np.zeros_like(layer.v)
        for i in active[tiles == tile]:
            partial = _clamp(partial + layer.matrix[i])
        layer.v = _clamp(layer.v + partial)


def _fire(network: RefNetwork, layer: RefLayer) -> np.ndarray:
    model = layer.neuron
    kind = NeuronKind(model.kind)
    if kind is NeuronKind.LIF:
        layer.v = network.add(layer.v, -model.leak)
    spikes = network.add(layer.v, -model.threshold) >= 0
    if kind is NeuronKind.RMP:
        layer.v = np.where(spikes, network.add(layer.v, -model.threshold), layer.v)
    else:
        layer.v = np.where(spikes, model.v_reset, layer.v)
    return spikes


def ref_step(network: RefNetwork, input_spikes) -> list:
    """=== Function name: ref_step ====================================================================================
    One timestep through all layers.
    :return: list of bool spike vectors, one per layer (the last is the network output)
    ==================================================================================================================="""
    x = np.asarray(input_spikes).astype(bool)
    if x.shape != (network.layers[0].input_width,):
        raise ShapeMismatchError("reference expects {} input spikes, got shape {}".format(
            network.layers[0].input_width, x.shape))
    outputs = []
    for layer in network.layers:
        _accumulate(network, layer, x)
        x = _fire(network, layer)
        outputs.append(x)
    return outputs


class RefTrace:
    """Spikes (layers 1..L), V after every timestep per layer as (T, width) arrays, final V per layer."""
    def __init__(self, spikes: SpikeTrain, vtrace: dict, final_v: dict):
        self.spikes: SpikeTrain     = spikes
        self.vtrace: dict           = vtrace
        self.final_v: dict          = final_v


def ref_run(network: RefNetwork, train: SpikeTrain) -> RefTrace:
    """Runs the input train (layer 0) from zeroed membranes."""
    network.reset()
    timesteps = train.timesteps
    n = len(network.layers)
    spikes = {k: np.zeros((timesteps, l.width), dtype=bool) for k, l in enumerate(network.layers, start=1)}
    vtrace = {k: np.zeros((timesteps, l.width), dtype=np.int64) for k, l in enumerate(network.layers, start=1)}
    for t in range(timesteps):
        for k, out in enumerate(ref_step(network, train.at(t, 0)), start=1):
            spikes[k][t] = out
            vtrace[k][t] = network.layers[k - 1].v
    final_v = {k: network.layers[k - 1].v.copy() for k in range(1, n + 1)}
    return RefTrace(SpikeTrain(spikes), vtrace, final_v)


class Divergence:
    def __init__(self, t: int, layer: int, neuron: int, field: str, sim_value, ref_value):
        self.t: int         = t
        self.layer: int     = layer
        self.neuron: int    = neuron
        self.field: str     = field
        self.sim_value      = sim_value
        self.ref_value      = ref_value

    def __repr__(self):
        return "{} diverges at t={}, layer={}, neuron={}: simulator {} vs reference {}".format(
            self.field, self.t, self.layer, self.neuron, self.sim_value, self.ref_value)


class Comparison:
    def __init__(self, divergence: Optional[Divergence] = None):
        self.divergence: Optional[Divergence] = divergence

    @property
    def equal(self) -> bool:
        return self.divergence is None

    def __bool__(self):
        return self.equal

    def __repr__(self):
        return "equal" if self.equal else repr(self.divergence)


def compare(sim, ref: RefTrace) -> Comparison:
    """=== Function name: compare =====================================================================================
    First divergence between a simulator result and a reference trace: spikes are scanned by timestep, layer, neuron;
    final membrane potentials afterwards (reported at the last timestep).
    :param sim: anything with .spikes (SpikeTrain) and .final_v (dict layer -> vector), e.g. an InferenceResult
    ==================================================================================================================="""
    sim_layers = [l for l in sim.spikes.layers if l != 0]
    ref_layers = [l for l in ref.spikes.layers if l != 0]
    if sim_layers != ref_layers:
        raise ShapeMismatchError("layers differ: simulator {} vs reference {}".format(sim_layers, ref_layers))
    for layer in sim_layers:
        if sim.spikes.spikes[layer].shape != ref.spikes.spikes[layer].shape:
            raise ShapeMismatchError("layer {} spikes: simulator {} vs reference {}".format(
                layer, sim.spikes.spikes[layer].shape, ref.spikes.spikes[layer].shape))
    for t in range(ref.spikes.timesteps):
        for layer in sim_layers:
            a, b = sim.spikes.at(t, layer), ref.spikes.at(t, layer)
            diff = np.flatnonzero(a != b)
            if diff.size:
                n = int(diff[0])
                return Comparison(Divergence(t, layer, n, "spike", int(a[n]), int(b[n])))
    last = ref.spikes.timesteps - 1
    for layer in sim_layers:
        a, b = np.asarray(sim.final_v[layer]), np.asarray(ref.final_v[layer])
        if a.shape != b.shape:
            raise ShapeMismatchError("layer {} final V: simulator {} vs reference {}".format(layer, a.shape, b.shape))
        diff = np.flatnonzero(a != b)
        if diff.size:
            n = int(diff[0])
            return Comparison(Divergence(last, layer, n, "v", int(a[n]), int(b[n])))
    return Comparison()
