"""=== Trace accounting =============================================================================================
Energy and delay attributed to an instruction trace. Only issued instructions cost anything, so a sparse input
shortens both. Totals depend on the multiset of kinds alone, never on the order of the events.
==================================================================================================================="""

import csv
import logging
from collections import Counter
from imp_energy.table import EnergyTable, default_table
from imp_isa.instruction import InstrKind
from imp_isa.neurons import NeuronKind

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -

KIND_ORDER = [k.value for k in InstrKind]

UPDATE_SEQUENCE = {
    NeuronKind.IF:  ("SpikeCheck", "ResetV"),
    NeuronKind.LIF: ("AccV2V", "SpikeCheck", "ResetV"),
    NeuronKind.RMP: ("SpikeCheck", "AccV2V"),
}


class KindCost:
    def __init__(self, kind: str, count: int = 0, energy_pj: float = 0.0, cycles: int = 0, ops: int = 0):
        self.kind: str          = kind
        self.count: int         = count
        self.energy_pj: float   = energy_pj
        self.cycles: int        = cycles
        self.ops: int           = ops


class CostReport:
    """=== Class name: CostReport =====================================================================================
    Totals of a trace plus the per-kind breakdown they are summed from.
    :param per_kind: dict       - kind -> KindCost, only kinds that occur
    :param clock_period_ns: float
    ==================================================================================================================="""
    def __init__(self, per_kind: dict, clock_period_ns: float):
        self.per_kind: dict             = per_kind
        self.clock_period_ns: float     = clock_period_ns

    @property
    def count(self) -> int:
        return sum(c.count for c in self.per_kind.values())

    @property
    def energy_pj(self) -> float:
        return sum(c.energy_pj for c in self.per_kind.values())

    @property
    def cycles(self) -> int:
        return sum(c.cycles for c in self.per_kind.values())

    @property
    def delay_ns(self) -> float:
        return self.cycles * self.clock_period_ns

    @property
    def ops(self) -> int:
        return sum(c.ops for c in self.per_kind.values())

    @property
    def edp(self) -> float:
        """Energy-delay product in pJ*ns."""
        return self.energy_pj * self.delay_ns

    @property
    def tops_per_w(self) -> float:
        """ops per pJ equals tera-ops per joule per second, i.e. TOPS/W."""
        energy = self.energy_pj
        return self.ops / energy if energy else 0.0

    @property
    def average_power_mw(self) -> float:
        """pJ / ns = mW."""
        delay = self.delay_ns
        return self.energy_pj / delay if delay else 0.0

    def summary(self) -> str:
        return "{} instructions, {:.3f} pJ, {:.1f} ns, EDP {:.3f} pJ*ns, {:.3f} TOPS/W, {:.3f} mW".format(
            self.count, self.energy_pj, self.delay_ns, self.edp, self.tops_per_w, self.average_power_mw)


def account(trace, table: EnergyTable = None) -> CostReport:
    """=== Function name: account =====================================================================================
    :param trace: iterable of TraceEvent-s (or bare kind strings)
    :raises UnknownInstructionError: a kind the table has no entry for
    ==================================================================================================================="""
    table = table if table is not None else default_table()
    counts = Counter(getattr(event, "kind", event) for event in trace)
    per_kind = {}
    for kind, n in counts.items():
        cost = table.cost(kind)
        per_kind[kind] = KindCost(kind, n, n * cost.energy_pj, n * cost.cycles, n * cost.ops)
    return CostReport(per_kind, table.clock_period_ns)


def neuron_update_cost(table: EnergyTable, kind: NeuronKind) -> dict:
    """Energy, delay and EDP of one update of a 12 neuron group (both parities), in total and per neuron."""
    sequence = [k for k in UPDATE_SEQUENCE[NeuronKind(kind)] for _ in range(2)]
    report = account(sequence, table)
    return {"energy_pj": report.energy_pj,
            "delay_ns": report.delay_ns,
            "edp": report.edp,
            "energy_per_neuron_pj": report.energy_pj / 12,
            "edp_per_neuron": report.edp / 12}


def write_cost_csv(path: str, report: CostReport):
    """kind,count,energy_pj,cycles per kind in instruction order, then a total row."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["kind", "count", "energy_pj", "cycles"])
        for kind in sorted(report.per_kind, key=lambda k: (KIND_ORDER.index(k) if k in KIND_ORDER else 99, k)):
            c = report.per_kind[kind]
            writer.writerow([kind, c.count, "{:.4f}".format(c.energy_pj), c.cycles])
        writer.writerow(["total", report.count, "{:.4f}".format(report.energy_pj), report.cycles])
    lg.debug("written   : cost report to {}".format(path))
