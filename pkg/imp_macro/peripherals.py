"""=== Column peripherals ===========================================================================================
Bitline sensing (SINV), the per-column bitwise-logic full adders (BLFA) and their carry MUX configuration.

Each column sees the wired OR / AND of the enabled cells on it (RBL gives NOR/OR, RBLB gives NAND/AND). From these
four signals a column derives propagate (a xor b = OR and NAND) and generate (a and b = AND), which is all a ripple
carry stage needs. Every function here works on arbitrary leading batch dimensions, so the exhaustive suites can push
all operand pairs through in a single call.
==================================================================================================================="""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence
import numpy as np
from imp_macro.geometry import GEOMETRY, MacroGeometry, MemArray, Mode, Parity, from_bits
from imp_macro.state import MacroState
from imp_messages.errors import DecoderConstraintError, MalformedInstructionError

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -

ADDER_KINDS = ("AccW2V", "AccV2V", "SpikeCheck")
MAX_READ_ROWS = 2


@dataclass(frozen=True)
class RowSelect:
    """One enabled read wordline. W rows carry the cycle parity: RWLo or RWLe."""
    array: MemArray
    row: int
    parity: Optional[Parity] = None


@dataclass(frozen=True, eq=False)
class BitwiseSense:
    """Per-column sensed signals. nor / nand are the complementary bitlines."""
    or_bit: np.ndarray
    and_bit: np.ndarray

    @property
    def nor_bit(self) -> np.ndarray:
        return 1 - self.or_bit

    @property
    def nand_bit(self) -> np.ndarray:
        return 1 - self.and_bit


@dataclass(frozen=True)
class ColumnMode:
    mode: Mode
    forwarded_sign_source: Optional[int] = None


@dataclass(frozen=True, eq=False)
class AdderConfig:
    """=== Class name: AdderConfig ====================================================================================
    Carry MUX settings of all columns for one instruction kind and cycle parity, plus the index tables the adder
    walks: value_cols (slots x 11, LSB first) and hole_cols (slots).
    ==================================================================================================================="""
    kind: str
    parity: Parity
    modes: tuple
    value_cols: np.ndarray
    hole_cols: np.ndarray
    forwards_sign: bool
    lower_bits: int


@dataclass(frozen=True, eq=False)
class SlotSums:
    sum_bits: np.ndarray        # (..., slots, 11)
    msb_cout: np.ndarray        # (..., slots)
    sign_bit: np.ndarray        # (..., slots)
    overflow: np.ndarray        # (..., slots) bool

    @property
    def values(self) -> np.ndarray:
        return from_bits(self.sum_bits)


# SENSING                                                                                   sensing - START -

@lru_cache(maxsize=None)
def w_enable_mask(geometry: MacroGeometry, parity: Parity) -> np.ndarray:
    """Columns a W row drives when only RWLo (odd) or RWLe (even) is raised."""
    mask = np.zeros(geometry.total_cols, dtype=bool)
    for g in range(geometry.weights_per_row):
        if (g % 2 == 0) == (Parity(parity) is Parity.ODD):
            mask[list(geometry.group_cols(g))] = True
    mask.setflags(write=False)
    return mask


def sense_cells(cells: np.ndarray, enable: np.ndarray) -> BitwiseSense:
    """=== Function name: sense_cells =================================================================================
    Wired logic of the read bitlines.
    :param cells: (..., k, cols) cell contents of the k candidate rows
    :param enable: (..., k, cols) which cells actually hang on a raised wordline
    :return: BitwiseSense of shape (..., cols). A column with one enabled cell reads or = and = cell, a column with
             none reads 0 on both.
    ==================================================================================================================="""
    cells = np.asarray(cells, dtype=bool)
    enable = np.asarray(enable, dtype=bool)
    any_enabled = enable.any(axis=-2)
    or_bit = (cells & enable).any(axis=-2)
    and_bit = (cells | ~enable).all(axis=-2) & any_enabled
    return BitwiseSense(or_bit=or_bit.astype(np.uint8), and_bit=and_bit.astype(np.uint8))


def sense_rows(state: MacroState, enabled_rows: Sequence[RowSelect], col_range: Optional[tuple] = None) -> BitwiseSense:
    """=== Function name: sense_rows ==================================================================================
    Raises the requested read wordlines and senses every column.
    :param enabled_rows: one or two RowSelect-s; W selectors must name their parity
    :param col_range: (start, stop) to restrict the returned columns, full width if None
    ==================================================================================================================="""
    geo = state.geometry
    if not 1 <= len(enabled_rows) <= MAX_READ_ROWS:
        raise DecoderConstraintError("{} read wordlines requested, decoder drives 1..{}".format(len(enabled_rows),
                                                                                             MAX_READ_ROWS))
    cells = np.zeros((len(enabled_rows), geo.total_cols), dtype=np.uint8)
    enable = np.zeros((len(enabled_rows), geo.total_cols), dtype=bool)
    for k, sel in enumerate(enabled_rows):
        state.check_row(sel.array, sel.row)
        if MemArray(sel.array) is MemArray.W:
            if sel.parity is None:
                raise DecoderConstraintError("W row {} selected without RWLo/RWLe parity".format(sel.row))
            cells[k, :geo.w_cols] = state.w_mem[sel.row]
            enable[k] = w_enable_mask(geo, Parity(sel.parity))
        else:
            cells[k] = state.v_mem[sel.row]
            enable[k] = True
    sense = sense_cells(cells, enable)
    if col_range is not None:
        start, stop = col_range
        sense = BitwiseSense(or_bit=sense.or_bit[start:stop], and_bit=sense.and_bit[start:stop])
    return sense

# SENSING                                                                                   sensing - ENDED -


# ADDER                                                                                     adder   - START -

@lru_cache(maxsize=None)
def build_adder_config(kind: str, parity: Parity, geometry: MacroGeometry = GEOMETRY) -> AdderConfig:
    """=== Function name: build_adder_config ==========================================================================
    Sets the carry MUXes of every column for one cycle.
    Within each 12 column group: LSB at col_base, CF on the next four, CS on the hole (col_base+5), CF on the next
    five and MSB at col_base+11. For AccW2V the columns above the hole take the weight sign forwarded by the CS
    column as their second operand; for AccV2V and SpikeCheck both operands are sensed V rows and the CS column only
    passes the carry on. Columns outside every group are IDLE.
    ==================================================================================================================="""
    kind = getattr(kind, "value", kind)
    if kind not in ADDER_KINDS:
        raise MalformedInstructionError("{} does not use the column adders".format(kind))
    parity = Parity(parity)
    forwards_sign = kind == "AccW2V"
    modes = [ColumnMode(Mode.IDLE)] * geometry.total_cols
    lower = geometry.weight_bits - 1
    for layout in geometry.slot_layouts(parity):
        base, hole = layout.col_base, layout.hole_col
        modes[base] = ColumnMode(Mode.LSB)
        for col in range(base + 1, hole):
            modes[col] = ColumnMode(Mode.CF)
        modes[hole] = ColumnMode(Mode.CS)
        for col in layout.value_cols[lower:-1]:
            modes[col] = ColumnMode(Mode.CF, forwarded_sign_source=hole if forwards_sign else None)
        modes[layout.value_cols[-1]] = ColumnMode(Mode.MSB, forwarded_sign_source=hole if forwards_sign else None)
    return AdderConfig(kind=kind,
                       parity=parity,
                       modes=tuple(modes),
                       value_cols=geometry.value_cols(parity),
                       hole_cols=geometry.hole_cols(parity),
                       forwards_sign=forwards_sign,
                       lower_bits=lower)


def ripple_add(sense: BitwiseSense, config: AdderConfig, saturate: bool = False) -> SlotSums:
    """=== Function name: ripple_add ==================================================================================
    Runs the BLFA chain of every group. SUM = a xor b xor c, COUT = a.b + c.(a xor b); carry-in at LSB is 0, the hole
    column yields sum 0 and hands the bit 4 carry to bit 5. Results wrap modulo 2^11 unless saturate is set.
    :return: SlotSums with 11 sum bits per slot, MSB carry-out, sign bit and signed-overflow flags
    ==================================================================================================================="""
    or_v = sense.or_bit[..., config.value_cols]
    and_v = sense.and_bit[..., config.value_cols]
    nand_v = 1 - and_v
    propagate = or_v & nand_v
    generate = and_v.copy()
    if config.forwards_sign:
        lower = config.lower_bits
        # upper columns carry a single V cell: or == and == V bit; the other operand is Wsign from the CS column
        wsign = sense.or_bit[..., config.hole_cols][..., None]
        v_hi = or_v[..., lower:]
        propagate[..., lower:] = v_hi ^ wsign
        generate[..., lower:] = v_hi & wsign

    n_bits = or_v.shape[-1]
    sum_bits = np.empty_like(or_v)
    carry = np.zeros(or_v.shape[:-1], dtype=np.uint8)
    carry_into_msb = carry
    for i in range(n_bits):
        if i == n_bits - 1:
            carry_into_msb = carry
        sum_bits[..., i] = propagate[..., i] ^ carry
        carry = generate[..., i] | (carry & propagate[..., i])
    overflow = (carry_into_msb ^ carry).astype(bool)

    if saturate and overflow.any():
        # negative operands overflow with carry-out 1, positive ones with 0
        limit = np.zeros(n_bits, dtype=np.uint8)
        negative = overflow & (carry == 1)
        positive = overflow & (carry == 0)
        limit_neg = limit.copy()
        limit_neg[-1] = 1
        limit_pos = 1 - limit_neg
        sum_bits[negative] = limit_neg
        sum_bits[positive] = limit_pos
    return SlotSums(sum_bits=sum_bits, msb_cout=carry, sign_bit=sum_bits[..., -1].copy(), overflow=overflow)

# ADDER                                                                                     adder   - ENDED -
