"""
SQLAlchemy powered DB Bases of the trace archive: one row per simulation run, one row per executed instruction.
"""

# imports for general Base handling START                                                   -   START   -
from sqlalchemy import Column, Float, Integer, String
from sqlalchemy.orm import declarative_base
# imports for general Base handling ENDED                                                   -   ENDED   -

# imports for local Base handling   START                                                   -   START   -
import hashlib
import time
from typing import Optional
# imports for local Base handling   ENDED                                                   -   ENDED   -

Base = declarative_base()

# CLASS definitions START                                                                   -   START   -


class RunRecord(Base):
    """=== Classname: RunRecord(Base) ==================================================================================
    Summary of one archived inference run.
    ==================================================================================================================="""
    __tablename__ = "runs"
    run_id: str = Column("run_id", String, primary_key=True)
    label: str = Column("label", String)
    timesteps: int = Column("timesteps", Integer)
    n_layers: int = Column("n_layers", Integer)
    n_macros: int = Column("n_macros", Integer)
    instructions: int = Column("instructions", Integer)
    overflow_events: int = Column("overflow_events", Integer)
    energy_pj: float = Column("energy_pj", Float)
    delay_ns: float = Column("delay_ns", Float)
    edp: float = Column("edp", Float)
    sparsity: float = Column("sparsity", Float)
    timestamp: float = Column("timestamp", Float)

    def __init__(self,
                 label: str,
                 timesteps: int,
                 n_layers: int,
                 n_macros: int,
                 instructions: int,
                 overflow_events: int,
                 energy_pj: float,
                 delay_ns: float,
                 edp: float,
                 sparsity: float,
                 timestamp: float = 0.0):
        self.label: str = label
        self.timesteps: int = timesteps
        self.n_layers: int = n_layers
        self.n_macros: int = n_macros
        self.instructions: int = instructions
        self.overflow_events: int = overflow_events
        self.energy_pj: float = energy_pj
        self.delay_ns: float = delay_ns
        self.edp: float = edp
        self.sparsity: float = sparsity
        self.timestamp: float = timestamp if timestamp else time.time()
        self.run_id: str = self.generate_id_hash()

    def generate_id_hash(self) -> str:
        """Unique ID of the row, from label and time of the run"""
        return hashlib.sha256("{}{}".format(self.label, self.timestamp).encode("utf-8")).hexdigest()[:16]

    def return_as_dict(self) -> dict:
        return {c.name: getattr(self, c.name) for c in self.__table__.columns}

    @classmethod
    def construct(cls, d_in: dict):
        """=== Classmethod: construct ==================================================================================
        Instantiates a row from a dict. A run_id in d_in is not recomputed.
        ==============================================================================================================="""
        d_in = dict(d_in)
        run_id = d_in.pop("run_id", None)
        row = cls(**d_in)
        if run_id:
            row.run_id = run_id
        return row

    def __repr__(self):
        return "{:<16} {:<24} T={:<3} {:>8} instr {:>12.2f} pJ".format(self.run_id, self.label, self.timesteps,
                                                                      self.instructions, self.energy_pj)


class InstructionEventRecord(Base):
    """=== Classname: InstructionEventRecord(Base) ======================================================================
    One TraceEvent of an archived run. seq is the issue position within the run.
    ==================================================================================================================="""
    __tablename__ = "instruction_events"
    event_key: str = Column("event_key", String, primary_key=True)
    run_id: str = Column("run_id", String, index=True)
    seq: int = Column("seq", Integer)
    kind: str = Column("kind", String)
    parity: str = Column("parity", String)
    macro_id: int = Column("macro_id", Integer)
    layer: int = Column("layer", Integer)
    timestep: int = Column("timestep", Integer)
    w_row: Optional[int] = Column("w_row", Integer, nullable=True)
    v_src: Optional[int] = Column("v_src", Integer, nullable=True)
    v_src2: Optional[int] = Column("v_src2", Integer, nullable=True)
    v_dst: Optional[int] = Column("v_dst", Integer, nullable=True)
    conditional: int = Column("conditional", Integer)
    cycles: int = Column("cycles", Integer)
    spike_mask: Optional[int] = Column("spike_mask", Integer, nullable=True)
    msb_cout: Optional[int] = Column("msb_cout", Integer, nullable=True)
    overflow: int = Column("overflow", Integer)

    def __init__(self,
                 run_id: str,
                 seq: int,
                 kind: str,
                 parity: str,
                 macro_id: int = 0,
                 layer: int = -1,
                 timestep: int = -1,
                 w_row: Optional[int] = None,
                 v_src: Optional[int] = None,
                 v_src2: Optional[int] = None,
                 v_dst: Optional[int] = None,
                 conditional: bool = False,
                 cycles: int = 1,
                 spike_mask: Optional[int] = None,
                 msb_cout: Optional[int] = None,
                 overflow: int = 0,
                 **kwargs):
        self.run_id: str = run_id
        self.seq: int = seq
        self.kind: str = kind
        self.parity: str = parity
        self.macro_id: int = macro_id
        self.layer: int = layer
        self.timestep: int = timestep
        self.w_row: Optional[int] = w_row
        self.v_src: Optional[int] = v_src
        self.v_src2: Optional[int] = v_src2
        self.v_dst: Optional[int] = v_dst
        self.conditional: int = int(bool(conditional))
        self.cycles: int = cycles
        self.spike_mask: Optional[int] = spike_mask
        self.msb_cout: Optional[int] = msb_cout
        self.overflow: int = overflow
        self.event_key: str = "{}:{}".format(run_id, seq)

    def return_as_dict(self) -> dict:
        return {c.name: getattr(self, c.name) for c in self.__table__.columns}

    @classmethod
    def construct(cls, d_in: dict):
        return cls(**d_in)

    def __repr__(self):
        return "{:<24} {:<10} {:<4} m{} L{} t{}".format(self.event_key, self.kind, self.parity, self.macro_id,
                                                      self.layer, self.timestep)

# CLASS definitions ENDED                                                                   -   ENDED   -
