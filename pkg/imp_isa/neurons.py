"""=== Neuron microsequences ========================================================================================
IF, LIF and RMP neurons built from SpikeCheck, AccV2V and ResetV. Each update runs the per-parity sequence for the
odd slots, then for the even slots, and returns the twelve spikes ordered by neuron (weight group) index.

    IF  : SpikeCheck, ResetV                      2 instructions per parity
    LIF : AccV2V(leak), SpikeCheck, ResetV        3 instructions per parity
    RMP : SpikeCheck, AccV2V(-theta, conditional) 2 instructions per parity
==================================================================================================================="""

import logging
from dataclasses import dataclass
from enum import Enum
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from imp_isa.executor import MacroExecutor
from imp_isa.instruction import acc_v2v, reset_v, spike_check
from imp_macro.geometry import PARITIES, Parity
from imp_messages.errors import MappingViolationError

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -


class NeuronKind(str, Enum):
    IF = "IF"
    LIF = "LIF"
    RMP = "RMP"


INSTRUCTIONS_PER_UPDATE = {NeuronKind.IF: 4, NeuronKind.LIF: 6, NeuronKind.RMP: 4}


class NeuronModel(BaseModel):
    """=== Model name: NeuronModel(BaseModel) ============================
    Neuron dynamics shared by all neurons of a layer. The leak is
    subtractive and only used by LIF.
    ===================================================================="""
    model_config = ConfigDict(frozen=True, use_enum_values=False)

    kind: NeuronKind    = NeuronKind.IF
    threshold: int      = Field(ge=1, le=1023)
    leak: int           = Field(default=0, ge=0, le=1024)
    v_reset: int        = Field(default=0, ge=-1024, le=1023)


@dataclass(frozen=True)
class ReservedRows:
    """V rows holding (-theta), (-leak) and v_reset, as (odd-aligned row, even-aligned row) pairs."""
    threshold: tuple    = (0, 1)
    leak: tuple         = (2, 3)
    reset: tuple        = (4, 5)

    @staticmethod
    def _pick(pair: tuple, parity: Parity) -> int:
        return pair[0] if Parity(parity) is Parity.ODD else pair[1]

    def threshold_row(self, parity: Parity) -> int:
        return self._pick(self.threshold, parity)

    def leak_row(self, parity: Parity) -> int:
        return self._pick(self.leak, parity)

    def reset_row(self, parity: Parity) -> int:
        return self._pick(self.reset, parity)

    def all_rows(self) -> tuple:
        return self.threshold + self.leak + self.reset


def program_reserved_rows(executor: MacroExecutor, model: NeuronModel, reserved: ReservedRows = ReservedRows()):
    """=== Function name: program_reserved_rows =======================================================================
    Host-side setup (not traced): stores (-theta) mod 2^11, (-leak) mod 2^11 and v_reset in every slot of both
    alignments of the reserved rows.
    ==================================================================================================================="""
    state = executor.state
    slots = state.geometry.slots_per_cycle
    for parity in PARITIES:
        state.store_slot_values(reserved.threshold_row(parity), np.full(slots, -model.threshold))
        state.store_slot_values(reserved.leak_row(parity), np.full(slots, -model.leak))
        state.store_slot_values(reserved.reset_row(parity), np.full(slots, model.v_reset))
    executor.reserved = reserved
    lg.debug("reserved  : macro {} programmed for {} theta={} leak={} v_reset={}".format(
        executor.macro_id, model.kind.value, model.threshold, model.leak, model.v_reset))


def neuron_update(executor: MacroExecutor, model: NeuronModel, context: tuple, reserved: ReservedRows = None) -> np.ndarray:
    """=== Function name: neuron_update ===============================================================================
    End-of-timestep update of the twelve neurons held in one V context.
    :param context: (odd-aligned row, even-aligned row)
    :param reserved: ReservedRows the macro was programmed with; falls back to the executor's
    :return: np.ndarray(12, bool) spikes, indexed by neuron (weight group)
    ==================================================================================================================="""
    reserved = reserved if reserved is not None else executor.reserved
    if reserved is None:
        raise MappingViolationError("macro {} has no reserved threshold/leak/reset rows".format(executor.macro_id))
    kind = NeuronKind(model.kind)
    for parity, v_row in zip(PARITIES, context):
        threshold_row = reserved.threshold_row(parity)
        if kind is NeuronKind.LIF:
            executor.execute(acc_v2v(v_row, reserved.leak_row(parity), v_row, parity))
        executor.execute(spike_check(v_row, threshold_row, parity))
        if kind is NeuronKind.RMP:
            executor.execute(acc_v2v(v_row, threshold_row, v_row, parity, conditional=True))
        else:
            executor.execute(reset_v(reserved.reset_row(parity), v_row, parity))
    spikes = executor.state.spike_buffers.copy()
    executor.state.clear_spike_buffers()
    return spikes
