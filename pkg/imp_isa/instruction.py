"""=== In-memory instruction set ====================================================================================
Four CIM instructions (AccW2V, AccV2V, SpikeCheck, ResetV) plus plain Read / Write.
The triple-row decoder takes at most two read addresses and one write address per instruction.
==================================================================================================================="""

from enum import Enum
from typing import Optional
import numpy as np
from imp_macro.geometry import GEOMETRY, MacroGeometry, Parity
from imp_messages.errors import MalformedInstructionError, ParityMismatchError, RowRangeError


class InstrKind(str, Enum):
    ACC_W2V = "AccW2V"
    ACC_V2V = "AccV2V"
    SPIKE_CHECK = "SpikeCheck"
    RESET_V = "ResetV"
    READ = "Read"
    WRITE = "Write"


CIM_KINDS = (InstrKind.ACC_W2V, InstrKind.ACC_V2V, InstrKind.SPIKE_CHECK, InstrKind.RESET_V)

# operand set per kind: (required, forbidden)
_OPERANDS = {
    InstrKind.ACC_W2V:      ({"w_row", "v_src", "v_dst"}, {"v_src2"}),
    InstrKind.ACC_V2V:      ({"v_src", "v_src2", "v_dst"}, {"w_row"}),
    InstrKind.SPIKE_CHECK:  ({"v_src", "v_src2"}, {"w_row", "v_dst"}),
    InstrKind.RESET_V:      ({"v_src", "v_dst"}, {"w_row", "v_src2"}),
}


class Instruction:
    """=== Class name: Instruction ====================================================================================
    One instruction as the host issues it.
    :param kind: InstrKind          - mnemonic
    :param parity: Parity           - odd (RWLo) or even (RWLe) cycle; all named V rows must share this alignment
    :param w_row: int               - W_MEM row (AccW2V, or Read / Write of a W row)
    :param v_src: int               - first V read row
    :param v_src2: int              - second V read row (AccV2V addend, SpikeCheck threshold row)
    :param v_dst: int               - V write row
    :param conditional: bool        - use the spike buffers as write mask (AccV2V)
    :param data: bits               - row payload of a Write
    ==================================================================================================================="""
    def __init__(self,
                 kind: InstrKind,
                 parity: Parity                 = Parity.ODD,
                 w_row: Optional[int]           = None,
                 v_src: Optional[int]           = None,
                 v_src2: Optional[int]          = None,
                 v_dst: Optional[int]           = None,
                 conditional: bool              = False,
                 data: Optional[np.ndarray]     = None):
        self.kind: InstrKind                = InstrKind(kind)
        self.parity: Parity                 = Parity(parity)
        self.w_row: Optional[int]           = w_row
        self.v_src: Optional[int]           = v_src
        self.v_src2: Optional[int]          = v_src2
        self.v_dst: Optional[int]           = v_dst
        self.conditional: bool              = conditional
        self.data: Optional[np.ndarray]     = data

    def _given(self) -> set:
        return {name for name in ("w_row", "v_src", "v_src2", "v_dst") if getattr(self, name) is not None}

    def v_rows(self) -> list:
        return [r for r in (self.v_src, self.v_src2, self.v_dst) if r is not None]

    def validate(self, geometry: MacroGeometry = GEOMETRY):
        """=== Method name: validate ===================================================================================
        Checks operand set, row ranges and parity alignment. Raises before anything touches the macro.
        ==============================================================================================================="""
        given = self._given()
        if self.kind in _OPERANDS:
            required, forbidden = _OPERANDS[self.kind]
            if required - given:
                raise MalformedInstructionError("{} misses operand(s) {}".format(self.kind.value,
                                                                               sorted(required - given)))
            if forbidden & given:
                raise MalformedInstructionError("{} does not take operand(s) {}".format(self.kind.value,
                                                                                      sorted(forbidden & given)))
            if self.conditional and self.kind is not InstrKind.ACC_V2V:
                raise MalformedInstructionError("only AccV2V has a conditional form")
        elif self.kind is InstrKind.READ:
            if len(given) != 1 or not given & {"w_row", "v_src"}:
                raise MalformedInstructionError("Read takes exactly one of w_row / v_src")
        elif self.kind is InstrKind.WRITE:
            if len(given) != 1 or not given & {"w_row", "v_dst"}:
                raise MalformedInstructionError("Write takes exactly one of w_row / v_dst")
            if self.data is None:
                raise MalformedInstructionError("Write without data")

        if self.w_row is not None and not 0 <= self.w_row < geometry.w_rows:
            raise RowRangeError("w_row {} outside [0, {})".format(self.w_row, geometry.w_rows))
        for row in self.v_rows():
            if not 0 <= row < geometry.v_rows:
                raise RowRangeError("V row {} outside [0, {})".format(row, geometry.v_rows))
        if self.kind in CIM_KINDS:
            for row in self.v_rows():
                if geometry.v_row_parity(row) is not self.parity:
                    raise ParityMismatchError("{} {}: V row {} is {}-aligned".format(
                        self.kind.value, self.parity.value, row, geometry.v_row_parity(row).value))
        return self

    def __repr__(self):
        return "Instruction({}, {}, w={}, v=({}, {})->{}{})".format(
            self.kind.value, self.parity.value, self.w_row, self.v_src, self.v_src2, self.v_dst,
            ", cond" if self.conditional else "")


# Constructors used by the runtime and the neuron microsequences                            -   START   -

def acc_w2v(w_row: int, parity: Parity, v_src: int, v_dst: int) -> Instruction:
    return Instruction(InstrKind.ACC_W2V, parity, w_row=w_row, v_src=v_src, v_dst=v_dst)


def acc_v2v(v_src: int, v_src2: int, v_dst: int, parity: Parity, conditional: bool = False) -> Instruction:
    return Instruction(InstrKind.ACC_V2V, parity, v_src=v_src, v_src2=v_src2, v_dst=v_dst, conditional=conditional)


def spike_check(v_src: int, v_src2: int, parity: Parity) -> Instruction:
    return Instruction(InstrKind.SPIKE_CHECK, parity, v_src=v_src, v_src2=v_src2)


def reset_v(v_src: int, v_dst: int, parity: Parity) -> Instruction:
    return Instruction(InstrKind.RESET_V, parity, v_src=v_src, v_dst=v_dst)

# Constructors used by the runtime and the neuron microsequences                            -   ENDED   -
