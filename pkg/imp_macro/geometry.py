"""=== Macro geometry ===============================================================================================
Array dimensions of the fused W_MEM / V_MEM macro and the staggered slot layout of the membrane potentials.

Column map (odd cycle, slot j):        Column map (even cycle, slot j):
    12j+0 .. 12j+4   V bits 0..4           6+12j+0 .. 6+12j+4   V bits 0..4
    12j+5            hole (Wsign of 2j)    6+12j+5              hole (Wsign of 2j+1)
    12j+6 .. 12j+11  V bits 5..10          6+12j+6 .. 6+12j+11  V bits 5..10

Weight group g always sits on columns 6g .. 6g+5 with its sign on 6g+5. Even numbered groups hang on RWLo (odd
cycle), odd numbered groups on RWLe (even cycle).
==================================================================================================================="""

from dataclasses import dataclass, field
from enum import Enum
import numpy as np


class Parity(str, Enum):
    ODD = "odd"
    EVEN = "even"


PARITIES = (Parity.ODD, Parity.EVEN)


class MemArray(str, Enum):
    W = "W"
    V = "V"


class Mode(str, Enum):
    """Column peripheral modes. IDLE marks columns outside every adder of the cycle."""
    CF = "CF"
    CS = "CS"
    LSB = "LSB"
    MSB = "MSB"
    IDLE = "IDLE"


@dataclass(frozen=True)
class SlotLayout:
    """Physical placement of one 11 bit membrane potential slot."""
    parity: Parity
    slot_index: int
    col_base: int
    hole_col: int
    value_cols: tuple

    @property
    def cols(self) -> range:
        return range(self.col_base, self.col_base + 12)


@dataclass(frozen=True)
class MacroGeometry:
    """=== Class name: MacroGeometry ==================================================================================
    Dimensions of one macro. The invariants between the numbers are checked on construction, so an alternative
    geometry either tiles the slots exactly or fails loudly.
    ==================================================================================================================="""
    w_rows: int             = 128
    w_cols: int             = 72
    v_rows: int             = 32
    total_cols: int         = 78
    weight_bits: int        = 6
    v_bits: int             = 11
    slot_cols: int          = 12
    slots_per_cycle: int    = 6
    weights_per_row: int    = 12
    reserved_v_rows: int    = 6
    _layouts: dict          = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.w_cols != self.weights_per_row * self.weight_bits:
            raise ValueError("w_cols must equal weights_per_row x weight_bits")
        if self.total_cols != self.w_cols + self.weight_bits:
            raise ValueError("total_cols must equal w_cols + weight_bits")
        if self.slots_per_cycle * self.slot_cols != self.w_cols:
            raise ValueError("slots_per_cycle x slot_cols must cover the weight columns")
        if self.slot_cols != self.v_bits + 1:
            raise ValueError("a slot is the value bits plus one hole column")
        for parity in PARITIES:
            layouts = tuple(self._build_layout(parity, j) for j in range(self.slots_per_cycle))
            value_cols = np.array([s.value_cols for s in layouts], dtype=np.intp)
            hole_cols = np.array([s.hole_col for s in layouts], dtype=np.intp)
            value_cols.setflags(write=False)
            hole_cols.setflags(write=False)
            self._layouts[parity] = (layouts, value_cols, hole_cols)

    def _build_layout(self, parity: Parity, j: int) -> SlotLayout:
        col_base = self.slot_cols * j + (0 if parity is Parity.ODD else self.weight_bits)
        hole = col_base + self.weight_bits - 1
        low = tuple(col_base + i for i in range(self.weight_bits - 1))
        high = tuple(col_base + 1 + i for i in range(self.weight_bits - 1, self.v_bits))
        return SlotLayout(parity=parity, slot_index=j, col_base=col_base, hole_col=hole, value_cols=low + high)

    # ---------------------------------------------------------------------------------------------- slot layout
    def slot_layouts(self, parity: Parity) -> tuple:
        return self._layouts[Parity(parity)][0]

    def value_cols(self, parity: Parity) -> np.ndarray:
        """(slots, v_bits) column index table, read-only."""
        return self._layouts[Parity(parity)][1]

    def hole_cols(self, parity: Parity) -> np.ndarray:
        return self._layouts[Parity(parity)][2]

    def group_of(self, parity: Parity, slot: int) -> int:
        """Weight group (= output neuron within the macro) served by a slot."""
        return 2 * slot + (0 if Parity(parity) is Parity.ODD else 1)

    def groups_of(self, parity: Parity) -> list:
        return [self.group_of(parity, j) for j in range(self.slots_per_cycle)]

    def group_cols(self, group: int) -> range:
        return range(group * self.weight_bits, (group + 1) * self.weight_bits)

    def v_row_parity(self, row: int) -> Parity:
        """Alignment of a V row: even numbered rows hold odd-cycle slots."""
        return Parity.ODD if row % 2 == 0 else Parity.EVEN

    # ------------------------------------------------------------------------------------------------ value ranges
    @property
    def v_min(self) -> int:
        return -(1 << (self.v_bits - 1))

    @property
    def v_max(self) -> int:
        return (1 << (self.v_bits - 1)) - 1

    @property
    def w_min(self) -> int:
        return -(1 << (self.weight_bits - 1))

    @property
    def w_max(self) -> int:
        return (1 << (self.weight_bits - 1)) - 1

    @property
    def max_contexts(self) -> int:
        return (self.v_rows - self.reserved_v_rows) // 2


GEOMETRY = MacroGeometry()


# Two's complement helpers                                                                 -   START   -

def wrap(values, nbits: int):
    """Reinterprets integers modulo 2^nbits as nbits wide two's complement."""
    half = 1 << (nbits - 1)
    return ((np.asarray(values, dtype=np.int64) + half) % (1 << nbits)) - half


def saturate(values, nbits: int):
    half = 1 << (nbits - 1)
    return np.clip(np.asarray(values, dtype=np.int64), -half, half - 1)


def to_bits(values, nbits: int) -> np.ndarray:
    """Integers (any shape) -> uint8 bits of shape (..., nbits), LSB first. Values are taken modulo 2^nbits."""
    vals = np.asarray(values, dtype=np.int64) & ((1 << nbits) - 1)
    return ((vals[..., None] >> np.arange(nbits, dtype=np.int64)) & 1).astype(np.uint8)


def from_bits(bits: np.ndarray) -> np.ndarray:
    """uint8 bits of shape (..., nbits), LSB first -> signed integers."""
    bits = np.asarray(bits, dtype=np.int64)
    nbits = bits.shape[-1]
    weights = 1 << np.arange(nbits, dtype=np.int64)
    weights[-1] = -weights[-1]
    return bits @ weights

# Two's complement helpers                                                                 -   ENDED   -
