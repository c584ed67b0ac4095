"""=== Macro state ==================================================================================================
Bit level contents of one macro: W_MEM, V_MEM and the spike buffers. All instruction semantics read and write
through this object.
==================================================================================================================="""

import logging
import numpy as np
from typing import Optional
from imp_macro.geometry import GEOMETRY, MacroGeometry, MemArray, Parity, PARITIES, to_bits, from_bits
from imp_messages.errors import RowRangeError, MappingViolationError, ParityMismatchError

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -


class MacroState:
    """=== Class name: MacroState =====================================================================================
    Sequential state machine of one macro. Memory is all zero at reset.
    :param strict: bool     - if True, V writes with a non-zero hole column and conditional writes with stale spike
                              buffers are rejected instead of tolerated.
    :param saturate: bool   - adders clamp instead of wrapping on signed overflow.
    ==================================================================================================================="""
    def __init__(self,
                 geometry: MacroGeometry    = GEOMETRY,
                 strict: bool               = False,
                 saturate: bool             = False):
        self.geometry: MacroGeometry        = geometry
        self.strict: bool                   = strict
        self.saturate: bool                 = saturate
        self.w_mem: np.ndarray              = np.zeros((geometry.w_rows, geometry.w_cols), dtype=np.uint8)
        self.v_mem: np.ndarray              = np.zeros((geometry.v_rows, geometry.total_cols), dtype=np.uint8)
        self.spike_buffers: np.ndarray      = np.zeros(geometry.weights_per_row, dtype=bool)
        self.spike_valid: dict              = {p: False for p in PARITIES}
        self.overflow_events: int           = 0

    # ------------------------------------------------------------------------------------------------ addressing
    def _array(self, array: MemArray) -> np.ndarray:
        return self.w_mem if MemArray(array) is MemArray.W else self.v_mem

    def check_row(self, array: MemArray, row: int):
        n_rows = self._array(array).shape[0]
        if not 0 <= int(row) < n_rows:
            raise RowRangeError("row {} outside {}_MEM [0, {})".format(row, MemArray(array).value, n_rows))

    def check_v_parity(self, row: int, parity: Parity):
        alignment = self.geometry.v_row_parity(row)
        if alignment is not Parity(parity):
            raise ParityMismatchError("V row {} is {}-aligned, addressed as {}".format(row, alignment.value,
                                                                                     Parity(parity).value))

    # ------------------------------------------------------------------------------------------------ plain access
    def read_row(self, array: MemArray, row: int) -> np.ndarray:
        """Normal SRAM read: a copy of the full row."""
        self.check_row(array, row)
        return self._array(array)[row].copy()

    def write_row(self, array: MemArray, row: int, bits) -> "MacroState":
        """Normal SRAM write of the full row."""
        self.check_row(array, row)
        target = self._array(array)
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape != target[row].shape:
            raise MappingViolationError("row write needs {} bits, got {}".format(target.shape[1], bits.shape))
        if np.any(bits > 1):
            raise MappingViolationError("row write carries non-binary values")
        if self.strict and MemArray(array) is MemArray.V:
            holes = self.geometry.hole_cols(self.geometry.v_row_parity(row))
            if np.any(bits[holes]):
                raise MappingViolationError("V row {} written with a set hole column".format(row))
        target[row] = bits
        return self

    # ------------------------------------------------------------------------------------------------ slot access
    def slot_values(self, row: int, parity: Optional[Parity] = None) -> np.ndarray:
        """Host side view of the six signed slot values of a V row (no instruction, no trace)."""
        self.check_row(MemArray.V, row)
        parity = self.geometry.v_row_parity(row) if parity is None else Parity(parity)
        return from_bits(self.v_mem[row][self.geometry.value_cols(parity)])

    def store_slot_values(self, row: int, values) -> "MacroState":
        """Host side load of six signed values into a V row in its own alignment (hole columns zero)."""
        self.check_row(MemArray.V, row)
        parity = self.geometry.v_row_parity(row)
        bits = np.zeros(self.geometry.total_cols, dtype=np.uint8)
        bits[self.geometry.value_cols(parity)] = to_bits(values, self.geometry.v_bits)
        return self.write_row(MemArray.V, row, bits)

    # ------------------------------------------------------------------------------------------------ spike buffers
    def spike_bank(self, parity: Parity) -> np.ndarray:
        """The six spike flags of one parity, in slot order."""
        return self.spike_buffers[self.geometry.groups_of(parity)].copy()

    def set_spike_bank(self, parity: Parity, mask):
        self.spike_buffers[self.geometry.groups_of(parity)] = np.asarray(mask, dtype=bool)
        self.spike_valid[Parity(parity)] = True

    def clear_spike_buffers(self):
        self.spike_buffers[:] = False
        for p in PARITIES:
            self.spike_valid[p] = False

    def copy(self) -> "MacroState":
        twin = MacroState(self.geometry, self.strict, self.saturate)
        twin.w_mem = self.w_mem.copy()
        twin.v_mem = self.v_mem.copy()
        twin.spike_buffers = self.spike_buffers.copy()
        twin.spike_valid = dict(self.spike_valid)
        twin.overflow_events = self.overflow_events
        return twin

    def __repr__(self):
        return "MacroState(spikes={}, overflow_events={})".format(
            "".join(str(int(b)) for b in self.spike_buffers), self.overflow_events)


def conditional_write(state: MacroState, dst_row: int, parity: Parity, data, mask) -> MacroState:
    """=== Function name: conditional_write ===========================================================================
    Conditional write driver. For each slot whose mask bit is set, the 11 value columns take the slot's data and the
    hole column is driven 0. Unmasked slots are left precharged: their columns stay bit-identical.
    :param data: 6 signed (or unsigned, taken mod 2^11) values in slot order
    :param mask: 6 booleans in slot order
    ==================================================================================================================="""
    geo = state.geometry
    state.check_row(MemArray.V, dst_row)
    state.check_v_parity(dst_row, parity)
    mask = np.asarray(mask, dtype=bool)
    data = np.asarray(data, dtype=np.int64)
    if mask.shape != (geo.slots_per_cycle,) or data.shape != (geo.slots_per_cycle,):
        raise MappingViolationError("conditional write needs {} slots".format(geo.slots_per_cycle))
    if not mask.any():
        return state
    cols = geo.value_cols(parity)[mask]
    holes = geo.hole_cols(parity)[mask]
    row = state.v_mem[dst_row]
    row[cols] = to_bits(data[mask], geo.v_bits)
    row[holes] = 0
    return state
