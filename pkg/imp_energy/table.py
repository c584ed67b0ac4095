"""=== Energy table =================================================================================================
Per-instruction energy and latency at one operating point. The defaults are the 200 MHz / 0.85 V point; energies
follow from the measured efficiencies as energy_pj = ops / (TOPS/W), with six 11 bit ops per CIM instruction (one
per slot and cycle). Plain Read / Write are priced at 0 pJ until configured.
==================================================================================================================="""

import json
import logging
import os
from typing import Optional, Union
from pydantic import BaseModel, Field, ValidationError
from imp_config import conf
from imp_messages.errors import ModelSchemaError, UnknownInstructionError

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -

DEFAULT_CLOCK_MHZ = 200.0
OPS_PER_ACC_INSTRUCTION = 6
DEFAULT_TOPS_PER_W = {"AccW2V": 0.99, "AccV2V": 1.18, "ResetV": 1.02, "SpikeCheck": 1.22}
HOST_KINDS = ("Read", "Write")


class InstrCost(BaseModel):
    """=== Model name: InstrCost(BaseModel) ==============================
    Price of one instruction of a kind. ops counts the 11 bit
    operations it performs (0 for host reads and writes).
    ===================================================================="""
    energy_pj: float    = Field(ge=0.0)
    cycles: int         = Field(default=1, ge=1)
    ops: int            = Field(default=OPS_PER_ACC_INSTRUCTION, ge=0)


class EnergyTable(BaseModel):
    """=== Model name: EnergyTable(BaseModel) ============================
    ===================================================================="""
    clock_period_ns: float          = Field(default=1000.0 / DEFAULT_CLOCK_MHZ, gt=0.0)
    ops_per_acc_instruction: int    = Field(default=OPS_PER_ACC_INSTRUCTION, ge=1)
    costs: dict[str, InstrCost]

    @classmethod
    def from_efficiencies(cls,
                          tops_per_w: dict,
                          clock_mhz: float                  = DEFAULT_CLOCK_MHZ,
                          ops_per_instruction: int          = OPS_PER_ACC_INSTRUCTION,
                          cycles: int                       = 1,
                          host_energy_pj: Optional[dict]    = None) -> "EnergyTable":
        """Table of an operating point given by its TOPS/W per CIM instruction kind."""
        if clock_mhz <= 0:
            raise ValueError("clock must be positive, got {} MHz".format(clock_mhz))
        costs = {}
        for kind, eff in tops_per_w.items():
            if eff <= 0:
                raise ValueError("efficiency of {} must be positive, got {}".format(kind, eff))
            costs[kind] = InstrCost(energy_pj=ops_per_instruction / eff, cycles=cycles, ops=ops_per_instruction)
        for kind in HOST_KINDS:
            costs.setdefault(kind, InstrCost(energy_pj=(host_energy_pj or {}).get(kind, 0.0), cycles=cycles, ops=0))
        return cls(clock_period_ns=1000.0 / clock_mhz, ops_per_acc_instruction=ops_per_instruction, costs=costs)

    def cost(self, kind: str) -> InstrCost:
        try:
            return self.costs[kind]
        except KeyError:
            raise UnknownInstructionError("no energy entry for instruction kind '{}'".format(kind))

    def tops_per_w(self, kind: str) -> float:
        """Configured efficiency of a kind; 0 for kinds that do no ops or cost nothing."""
        c = self.cost(kind)
        return c.ops / c.energy_pj if c.ops and c.energy_pj else 0.0


def default_table() -> EnergyTable:
    return EnergyTable.from_efficiencies(DEFAULT_TOPS_PER_W)


def _field_path(err: ValidationError) -> str:
    first = err.errors()[0]
    return ".".join(str(p) for p in first.get("loc", ()))


def table_from_dict(data: dict) -> EnergyTable:
    """Accepts either a full table dump or the short form {"tops_per_w": {...}, "clock_mhz": ...}."""
    try:
        if "tops_per_w" in data:
            return EnergyTable.from_efficiencies(data["tops_per_w"],
                                                 clock_mhz=data.get("clock_mhz", DEFAULT_CLOCK_MHZ),
                                                 ops_per_instruction=data.get("ops_per_instruction",
                                                                              OPS_PER_ACC_INSTRUCTION),
                                                 cycles=data.get("cycles", 1),
                                                 host_energy_pj=data.get("host_energy_pj"))
        return EnergyTable.model_validate(data)
    except ValidationError as e:
        raise ModelSchemaError("invalid energy table: {}".format(e.errors()[0].get("msg", e)), _field_path(e))
    except (TypeError, ValueError, AttributeError) as e:
        raise ModelSchemaError("invalid energy table: {}".format(e), "tops_per_w")


def load_energy_table(path: str) -> EnergyTable:
    with open(path, "r") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as e:
            raise ModelSchemaError("{} is not valid JSON: {}".format(path, e))
    if not isinstance(data, dict):
        raise ModelSchemaError("{}: energy table must be a JSON object".format(path))
    table = table_from_dict(data)
    lg.info("loaded    : energy table from {}".format(path))
    return table


def resolve_energy_table(override: Union[None, str, dict] = None, base_dir: Optional[str] = None) -> EnergyTable:
    """Model override (path or inline dict) first, then IMPULSE_ENERGY_TABLE, then the defaults.
    A relative override path is taken relative to base_dir (the model file's folder) when given."""
    if isinstance(override, dict):
        return table_from_dict(override)
    if override:
        if base_dir and not os.path.isabs(override):
            override = os.path.join(base_dir, override)
        return load_energy_table(override)
    if conf.ENERGY_TABLE_PATH:
        return load_energy_table(conf.ENERGY_TABLE_PATH)
    return default_table()
