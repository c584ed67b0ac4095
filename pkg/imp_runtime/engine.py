"""=== Event driven inference engine ================================================================================
Drives spikes through the mapped layers one timestep at a time. Only spiking inputs issue instructions: every input
spike becomes AccW2V (odd, then even) on its W row, ascending neuron order; at the timestep boundary each V context
gets one neuron update. Inter-layer spike transport is an ideal buffer between the layers.
==================================================================================================================="""

import logging
import inspect
from typing import Optional
import numpy as np
from imp_isa.executor import MacroExecutor
from imp_isa.instruction import acc_v2v, acc_w2v
from imp_isa.neurons import neuron_update, program_reserved_rows
from imp_macro.geometry import GEOMETRY, MacroGeometry, PARITIES, Parity, from_bits
from imp_macro.state import MacroState
from imp_mapper.layers import LayerKind, LayerSpec
from imp_mapper.mapping import ROLE_OWNER, LayerMapping, conv_tap_row, map_network
from imp_messages.errors import MappingViolationError, ShapeMismatchError
from imp_runtime.spikes import RunStats, SpikeTrain

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -


class LayerEngine:
    """=== Class name: LayerEngine ====================================================================================
    Executors of one mapped layer and the host logic around them: fan-out of input spikes to W rows, partial-sum
    merge of input-tiled FC layers, and V-context swapping of Conv layers with more positions than contexts.
    ==================================================================================================================="""
    ccn = inspect.currentframe().f_code.co_name  # current class name

    def __init__(self,
                 mapping: LayerMapping,
                 trace: list,
                 strict: bool                   = False,
                 saturate: bool                 = False,
                 cycles_per_instruction: int    = 1,
                 geometry: MacroGeometry        = GEOMETRY):
        self.mapping: LayerMapping          = mapping
        self.spec: LayerSpec                = mapping.spec
        self.layer_index: int               = mapping.layer_index
        self.geometry: MacroGeometry        = geometry
        self.allocations: dict              = {a.macro_id: a for a in mapping.allocations}
        self.executors: dict                = {}
        for alloc in mapping.allocations:
            executor = MacroExecutor(MacroState(geometry, strict=strict, saturate=saturate),
                                     macro_id=alloc.macro_id,
                                     cycles_per_instruction=cycles_per_instruction,
                                     trace=trace)
            executor.state.w_mem[:] = alloc.w_image
            program_reserved_rows(executor, self.spec.neuron, alloc.reserved)
            self.executors[alloc.macro_id] = executor

        if self.spec.kind is LayerKind.FC:
            self._fanout = [[] for _ in range(self.spec.input_width)]
            for alloc in mapping.allocations:
                for neuron, row in alloc.input_map.items():
                    self._fanout[neuron].append((self.executors[alloc.macro_id], alloc, row))
        else:
            self._fields = self._receptive_fields()
            self._multiplexed = len(mapping.pixel_schedule) > 1
            self._store = {a.macro_id: np.zeros((self.spec.positions, 2, geometry.total_cols), dtype=np.uint8)
                           for a in mapping.allocations}
            self._context_of = {oy * self.spec.out_w + ox: k
                                for batch in mapping.pixel_schedule for k, (oy, ox) in batch}
        lg.info("init.ed   : layer {} {} on macros {} - says {}".format(self.layer_index, self.spec.describe(),
                                                                     sorted(self.executors), self.ccn))

    # ---------------------------------------------------------------------------------------------------- setup
    def _receptive_fields(self) -> list:
        """Per output position: (input neurons ascending, matching W rows)."""
        s = self.spec
        fields = []
        for oy in range(s.out_h):
            for ox in range(s.out_w):
                inputs, rows = [], []
                for ky in range(s.kernel_h):
                    iy = oy * s.stride + ky - s.padding
                    if not 0 <= iy < s.in_h:
                        continue
                    for kx in range(s.kernel_w):
                        ix = ox * s.stride + kx - s.padding
                        if not 0 <= ix < s.in_w:
                            continue
                        for c in range(s.in_channels):
                            inputs.append((iy * s.in_w + ix) * s.in_channels + c)
                            rows.append(conv_tap_row(ky, kx, c, s))
                order = np.argsort(inputs, kind="stable")
                fields.append((np.asarray(inputs, dtype=np.intp)[order], np.asarray(rows, dtype=np.intp)[order]))
        return fields

    def tag(self, timestep: int):
        for executor in self.executors.values():
            executor.tag(self.layer_index, timestep)

    # ------------------------------------------------------------------------------------------------ timestep
    def run_timestep(self, input_spikes, t: int = 0) -> np.ndarray:
        """=== Method name: run_timestep ===============================================================================
        :param input_spikes: bit vector of the layer's input width
        :return: np.ndarray(bool) output spikes of the layer
        ==============================================================================================================="""
        input_spikes = np.asarray(input_spikes).astype(bool)
        if input_spikes.shape != (self.spec.input_width,):
            raise ShapeMismatchError("layer {} expects {} input spikes, got shape {}".format(
                self.layer_index, self.spec.input_width, input_spikes.shape))
        self.tag(t)
        if self.spec.kind is LayerKind.FC:
            return self._run_fc(input_spikes)
        return self._run_conv(input_spikes)

    @staticmethod
    def _accumulate(executor: MacroExecutor, w_row: int, context: tuple):
        for parity, v_row in zip(PARITIES, context):
            executor.execute(acc_w2v(w_row, parity, v_row, v_row))

    def _run_fc(self, input_spikes: np.ndarray) -> np.ndarray:
        touched = set()
        for neuron in np.flatnonzero(input_spikes):
            for executor, alloc, row in self._fanout[neuron]:
                self._accumulate(executor, row, alloc.v_contexts[0])
                touched.add(alloc.macro_id)
        self._merge_partials(touched)
        out = np.zeros(self.spec.output_width, dtype=bool)
        for alloc in self.mapping.output_tiles:
            spikes = neuron_update(self.executors[alloc.macro_id], self.spec.neuron, alloc.v_contexts[0],
                                   alloc.reserved)
            for group, neuron in enumerate(alloc.output_map):
                if neuron is not None:
                    out[neuron] = spikes[group]
        return out

    def _merge_partials(self, touched: set):
        """Host merge: donor context -> owner scratch rows -> AccV2V into the owner context; donor cleared."""
        zeros = np.zeros(self.geometry.total_cols, dtype=np.uint8)
        for owner in self.mapping.output_tiles:
            if owner.role != ROLE_OWNER:
                continue
            owner_ex = self.executors[owner.macro_id]
            for donor_id in owner.merge_sources:
                if donor_id not in touched:
                    continue
                donor, donor_ex = self.allocations[donor_id], self.executors[donor_id]
                for p, parity in enumerate(PARITIES):
                    ctx_row, scratch_row = owner.v_contexts[0][p], owner.merge_scratch[p]
                    partial = donor_ex.read_v(donor.v_contexts[0][p])
                    owner_ex.write_v(scratch_row, partial)
                    owner_ex.execute(acc_v2v(ctx_row, scratch_row, ctx_row, parity))
                    donor_ex.write_v(donor.v_contexts[0][p], zeros)

    def _run_conv(self, input_spikes: np.ndarray) -> np.ndarray:
        s = self.spec
        out = np.zeros(s.output_width, dtype=bool)
        for alloc in self.mapping.allocations:
            executor = self.executors[alloc.macro_id]
            store = self._store[alloc.macro_id]
            for batch in self.mapping.pixel_schedule:
                placed = [(alloc.v_contexts[k], oy * s.out_w + ox) for k, (oy, ox) in batch]
                if self._multiplexed:
                    for context, pos in placed:
                        for p in range(2):
                            executor.write_v(context[p], store[pos, p])
                for context, pos in placed:
                    inputs, rows = self._fields[pos]
                    for row in rows[input_spikes[inputs]]:
                        self._accumulate(executor, int(row), context)
                for context, pos in placed:
                    spikes = neuron_update(executor, s.neuron, context, alloc.reserved)
                    for group, channel in enumerate(alloc.output_map):
                        if channel is not None:
                            out[pos * s.out_channels + channel] = spikes[group]
                if self._multiplexed:
                    for context, pos in placed:
                        for p in range(2):
                            store[pos, p] = executor.read_v(context[p])
        return out

    # -------------------------------------------------------------------------------------------- inspection
    def vmem_value(self, neuron: int) -> int:
        """Host-side (untraced) view of one neuron's membrane potential."""
        geo = self.geometry
        if self.spec.kind is LayerKind.FC:
            alloc = self.mapping.output_tiles[neuron // geo.weights_per_row]
            group = neuron % geo.weights_per_row
            bits = self.executors[alloc.macro_id].state.v_mem[alloc.v_contexts[0][group % 2]]
        else:
            pos, channel = divmod(neuron, self.spec.out_channels)
            alloc = self.mapping.allocations[channel // geo.weights_per_row]
            group = channel % geo.weights_per_row
            if self._multiplexed:
                bits = self._store[alloc.macro_id][pos, group % 2]
            else:
                context = alloc.v_contexts[self._context_of[pos]]
                bits = self.executors[alloc.macro_id].state.v_mem[context[group % 2]]
        parity = Parity.ODD if group % 2 == 0 else Parity.EVEN
        return int(from_bits(bits[geo.value_cols(parity)[group // 2]]))

    def vmem_vector(self) -> np.ndarray:
        return np.array([self.vmem_value(n) for n in range(self.spec.output_width)], dtype=np.int64)


class InferenceResult:
    """Output spikes (layers 1..L), V trace rows (t, layer, neuron, v), stats, final V per layer and the trace."""
    def __init__(self, spikes: SpikeTrain, vtrace: list, stats: RunStats, final_v: dict, trace: list):
        self.spikes: SpikeTrain     = spikes
        self.vtrace: list           = vtrace
        self.stats: RunStats        = stats
        self.final_v: dict          = final_v
        self.trace: list            = trace


class Network:
    """=== Class name: Network ========================================================================================
    Mapped, loaded network. All executors share one trace list, so events are ordered by issue time.
    ==================================================================================================================="""
    ccn = inspect.currentframe().f_code.co_name  # current class name

    def __init__(self,
                 layers: list,
                 strict: bool                   = False,
                 saturate: bool                 = False,
                 cycles_per_instruction: int    = 1,
                 geometry: MacroGeometry        = GEOMETRY):
        self.layers: list                   = list(layers)
        self.strict: bool                   = strict
        self.saturate: bool                 = saturate
        self.trace: list                    = []
        self.mappings: list                 = map_network(self.layers, geometry)
        self.engines: list                  = [LayerEngine(m, self.trace, strict, saturate, cycles_per_instruction,
                                                           geometry) for m in self.mappings]
        lg.info("init.ed   : {} layer(s) on {} macro(s), strict={}, saturate={} - says {}".format(
            len(self.engines), self.n_macros, strict, saturate, self.ccn))

    @property
    def n_macros(self) -> int:
        return sum(m.n_macros for m in self.mappings)

    @property
    def input_width(self) -> int:
        return self.layers[0].input_width

    def engine(self, layer: int) -> LayerEngine:
        return self.engines[layer - 1]


def compile_network(layers: list, strict: bool = False, saturate: bool = False, cycles_per_instruction: int = 1,
                    geometry: MacroGeometry = GEOMETRY) -> Network:
    return Network(layers, strict, saturate, cycles_per_instruction, geometry)


def run_timestep(engine: LayerEngine, input_spikes, t: int = 0) -> np.ndarray:
    """One layer, one timestep."""
    return engine.run_timestep(input_spikes, t)


def run_inference(network: Network, train: SpikeTrain, trace_neurons: Optional[list] = None) -> InferenceResult:
    """=== Function name: run_inference ===============================================================================
    Runs all timesteps of the input train (layer 0) through the layers in order.
    :param trace_neurons: (layer, neuron) pairs whose V is recorded after every timestep; all neurons of the last
                          layer if None
    ==================================================================================================================="""
    if not network.engines:
        raise MappingViolationError("network has no mapped layers")
    if 0 not in train.spikes:
        raise ShapeMismatchError("input spike train has no layer 0")
    if train.width(0) != network.input_width:
        raise ShapeMismatchError("input train is {} wide, first layer expects {}".format(train.width(0),
                                                                                      network.input_width))
    timesteps = train.timesteps
    if timesteps < 1:
        raise ShapeMismatchError("input train has no timesteps")
    last = len(network.engines)
    if trace_neurons is None:
        trace_neurons = [(last, n) for n in range(network.engines[-1].spec.output_width)]
    for layer, neuron in trace_neurons:
        if not 1 <= layer <= last or not 0 <= neuron < network.engine(layer).spec.output_width:
            raise ShapeMismatchError("no neuron {} in layer {}".format(neuron, layer))

    first_event = len(network.trace)
    stats = RunStats()
    outputs = {e.layer_index: np.zeros((timesteps, e.spec.output_width), dtype=bool) for e in network.engines}
    vtrace = []
    lg.info("inference : {} timestep(s) through {} layer(s)".format(timesteps, last))
    for t in range(timesteps):
        x = train.at(t, 0)
        stats.record_spikes(0, t, x)
        for engine in network.engines:
            x = engine.run_timestep(x, t)
            outputs[engine.layer_index][t] = x
            stats.record_spikes(engine.layer_index, t, x)
        for layer, neuron in trace_neurons:
            vtrace.append((t, layer, neuron, network.engine(layer).vmem_value(neuron)))
    run_trace = network.trace[first_event:]
    stats.record_trace(run_trace)
    final_v = {e.layer_index: e.vmem_vector() for e in network.engines}
    lg.info("inference : done, {} instruction(s), {} overflow event(s)".format(len(run_trace),
                                                                           stats.overflow_events))
    return InferenceResult(SpikeTrain(outputs), vtrace, stats, final_v, run_trace)
