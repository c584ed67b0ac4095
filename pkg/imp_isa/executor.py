"""=== Instruction executor =========================================================================================
Executes instructions against a MacroState. The exec_* functions implement the semantics of one kind each; the
MacroExecutor validates, dispatches, and appends exactly one TraceEvent per executed instruction.
==================================================================================================================="""

import logging
import inspect
from typing import Optional
import numpy as np
from imp_isa.instruction import Instruction, InstrKind
from imp_macro.geometry import MemArray, Parity, from_bits
from imp_macro.peripherals import RowSelect, SlotSums, build_adder_config, ripple_add, sense_rows
from imp_macro.state import MacroState, conditional_write
from imp_messages.errors import StaleSpikeBufferError
from imp_messages.msg import TraceEvent

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -


class ExecResult:
    """Outcome of one instruction: the (mutated) state, the spike flags it set, the adder outputs and read data."""
    def __init__(self,
                 state: MacroState,
                 spike_mask_delta: Optional[np.ndarray]     = None,
                 sums: Optional[SlotSums]                   = None,
                 row_bits: Optional[np.ndarray]             = None,
                 trace_event: Optional[TraceEvent]          = None):
        self.state: MacroState                          = state
        self.spike_mask_delta: Optional[np.ndarray]     = spike_mask_delta
        self.sums: Optional[SlotSums]                   = sums
        self.row_bits: Optional[np.ndarray]             = row_bits
        self.trace_event: Optional[TraceEvent]          = trace_event


def _mask_to_int(mask) -> int:
    return int(sum(int(bool(b)) << j for j, b in enumerate(mask)))


def _add(state: MacroState, selects: list, kind: str, parity: Parity) -> SlotSums:
    sums = ripple_add(sense_rows(state, selects), build_adder_config(kind, parity, state.geometry), state.saturate)
    state.overflow_events += int(np.count_nonzero(sums.overflow))
    return sums


def _require_spikes(state: MacroState, parity: Parity, what: str):
    if state.strict and not state.spike_valid[Parity(parity)]:
        raise StaleSpikeBufferError("{} ({}) issued without a preceding SpikeCheck".format(what, Parity(parity).value))


# INSTRUCTION SEMANTICS                                                                     semantics - START -

def _accw2v(state: MacroState, w_row: int, parity: Parity, v_src: int, v_dst: int) -> ExecResult:
    state.check_v_parity(v_src, parity)
    state.check_v_parity(v_dst, parity)
    sums = _add(state, [RowSelect(MemArray.W, w_row, parity), RowSelect(MemArray.V, v_src)], "AccW2V", parity)
    conditional_write(state, v_dst, parity, sums.values, np.ones(state.geometry.slots_per_cycle, dtype=bool))
    return ExecResult(state, sums=sums)


def _accv2v(state: MacroState, v_src: int, v_src2: int, v_dst: int, parity: Parity, conditional: bool) -> ExecResult:
    for row in (v_src, v_src2, v_dst):
        state.check_v_parity(row, parity)
    if conditional:
        _require_spikes(state, parity, "conditional AccV2V")
        mask = state.spike_bank(parity)
    else:
        mask = np.ones(state.geometry.slots_per_cycle, dtype=bool)
    sums = _add(state, [RowSelect(MemArray.V, v_src), RowSelect(MemArray.V, v_src2)], "AccV2V", parity)
    conditional_write(state, v_dst, parity, sums.values, mask)
    return ExecResult(state, sums=sums)


def _spikecheck(state: MacroState, v_src: int, v_src2: int, parity: Parity) -> ExecResult:
    state.check_v_parity(v_src, parity)
    state.check_v_parity(v_src2, parity)
    sums = _add(state, [RowSelect(MemArray.V, v_src), RowSelect(MemArray.V, v_src2)], "SpikeCheck", parity)
    spikes = sums.sign_bit == 0
    state.set_spike_bank(parity, spikes)
    delta = np.zeros(state.geometry.weights_per_row, dtype=bool)
    delta[state.geometry.groups_of(parity)] = spikes
    return ExecResult(state, spike_mask_delta=delta, sums=sums)


def _resetv(state: MacroState, v_src: int, v_dst: int, parity: Parity) -> ExecResult:
    state.check_v_parity(v_src, parity)
    state.check_v_parity(v_dst, parity)
    _require_spikes(state, parity, "ResetV")
    # BLFA bypassed: the latched single-row read goes straight to the write driver
    sense = sense_rows(state, [RowSelect(MemArray.V, v_src)])
    values = from_bits(sense.or_bit[state.geometry.value_cols(parity)])
    conditional_write(state, v_dst, parity, values, state.spike_bank(parity))
    return ExecResult(state)


def exec_accw2v(state: MacroState, w_row: int, parity: Parity, v_src: int, v_dst: int) -> MacroState:
    """=== Function name: exec_accw2v =================================================================================
    v_dst[j] <- v_src[j] + weight(w_row, group(parity, j)) mod 2^11 for all six slots of the parity at once.
    v_src == v_dst is fine: the row is sensed before the write driver fires.
    ==================================================================================================================="""
    return _accw2v(state, w_row, Parity(parity), v_src, v_dst).state


def exec_accv2v(state: MacroState, v_src: int, v_src2: int, v_dst: int, conditional: bool = False,
                parity: Optional[Parity] = None) -> MacroState:
    """v_dst[j] <- v_src[j] + v_src2[j], written only where the spike buffers allow it if conditional."""
    parity = state.geometry.v_row_parity(v_src) if parity is None else Parity(parity)
    return _accv2v(state, v_src, v_src2, v_dst, parity, conditional).state


def exec_spikecheck(state: MacroState, v_src: int, v_src2: int, parity: Parity) -> np.ndarray:
    """=== Function name: exec_spikecheck =============================================================================
    Adders as comparators: V + (-theta) with sign bit 0 means V >= theta. Sets the spike buffers of the parity and
    returns the six spike flags. V_MEM is not written.
    ==================================================================================================================="""
    return _spikecheck(state, v_src, v_src2, Parity(parity)).spike_mask_delta[state.geometry.groups_of(parity)]


def exec_resetv(state: MacroState, v_src: int, v_dst: int, parity: Parity) -> MacroState:
    """Copies the reset row's slot values into the spiking slots of v_dst."""
    return _resetv(state, v_src, v_dst, Parity(parity)).state

# INSTRUCTION SEMANTICS                                                                     semantics - ENDED -


class MacroExecutor:
    """=== Class name: MacroExecutor ==================================================================================
    Owns one macro and the trace of everything issued against it.
    Instructions execute strictly in order; hand an executor between threads if you like, never share it.
    :param state: MacroState            - the macro; a fresh zeroed one if None
    :param macro_id: int                - stamped on every trace event
    :param cycles_per_instruction: int  - latency of one instruction
    :param trace: list                  - shared event sink (e.g. one list for a whole network), own list if None
    ==================================================================================================================="""
    ccn = inspect.currentframe().f_code.co_name  # current class name

    def __init__(self,
                 state: Optional[MacroState]    = None,
                 macro_id: int                  = 0,
                 cycles_per_instruction: int    = 1,
                 trace: Optional[list]          = None):
        self.state: MacroState              = state if state is not None else MacroState()
        self.macro_id: int                  = macro_id
        self.cycles_per_instruction: int    = cycles_per_instruction
        self.trace: list                    = trace if trace is not None else []
        self.layer: int                     = -1
        self.timestep: int                  = -1
        self.reserved                       = None  # ReservedRows once programmed
        lg.debug("init.ed   : macro_id={}, cycles/instr={} - says {}".format(self.macro_id,
                                                                          self.cycles_per_instruction, self.ccn))

    def tag(self, layer: int, timestep: int):
        """Sets the layer / timestep stamped on subsequent events."""
        self.layer = layer
        self.timestep = timestep

    def execute(self, instr: Instruction) -> ExecResult:
        """=== Method name: execute ====================================================================================
        Validates and runs one instruction, then appends its TraceEvent. A rejected instruction leaves both the
        state and the trace untouched.
        ==============================================================================================================="""
        instr.validate(self.state.geometry)
        overflow_before = self.state.overflow_events
        kind, parity = instr.kind, instr.parity
        if kind is InstrKind.ACC_W2V:
            result = _accw2v(self.state, instr.w_row, parity, instr.v_src, instr.v_dst)
        elif kind is InstrKind.ACC_V2V:
            result = _accv2v(self.state, instr.v_src, instr.v_src2, instr.v_dst, parity, instr.conditional)
        elif kind is InstrKind.SPIKE_CHECK:
            result = _spikecheck(self.state, instr.v_src, instr.v_src2, parity)
        elif kind is InstrKind.RESET_V:
            result = _resetv(self.state, instr.v_src, instr.v_dst, parity)
        elif kind is InstrKind.READ:
            array, row = (MemArray.W, instr.w_row) if instr.w_row is not None else (MemArray.V, instr.v_src)
            result = ExecResult(self.state, row_bits=self.state.read_row(array, row))
        else:
            array, row = (MemArray.W, instr.w_row) if instr.w_row is not None else (MemArray.V, instr.v_dst)
            self.state.write_row(array, row, instr.data)
            result = ExecResult(self.state)

        sums = result.sums
        event = TraceEvent(kind=kind.value,
                           parity=parity.value,
                           w_row=instr.w_row,
                           v_src=instr.v_src,
                           v_src2=instr.v_src2,
                           v_dst=instr.v_dst,
                           conditional=instr.conditional,
                           cycles=self.cycles_per_instruction,
                           spike_mask=(_mask_to_int(result.spike_mask_delta[self.state.geometry.groups_of(parity)])
                                       if result.spike_mask_delta is not None else None),
                           msb_cout=_mask_to_int(sums.msb_cout) if sums is not None else None,
                           overflow=self.state.overflow_events - overflow_before,
                           macro_id=self.macro_id,
                           timestep=self.timestep,
                           layer=self.layer)
        self.trace.append(event)
        result.trace_event = event
        return result

    # --------------------------------------------------------------------------------------------- host access
    def read_v(self, row: int) -> np.ndarray:
        """Read instruction on a V row, returns the row bits."""
        return self.execute(Instruction(InstrKind.READ, v_src=row)).row_bits

    def write_v(self, row: int, bits) -> ExecResult:
        return self.execute(Instruction(InstrKind.WRITE, v_dst=row, data=np.asarray(bits, dtype=np.uint8)))


def execute(state: MacroState, instr: Instruction, trace: Optional[list] = None) -> ExecResult:
    """Single-shot dispatch against a bare state; the event lands in trace if given."""
    return MacroExecutor(state, trace=trace).execute(instr)
