"""=== EDP versus input sparsity =====================================================================================
One 128 input / 12 output IF group, one timestep per sparsity point. At sparsity s, k = round((1 - s) * 128) randomly
chosen inputs spike; the group's EDP is divided by its 12 neurons. The 0 % point (all inputs spike) is the reference
of the reduction figures.
==================================================================================================================="""

import csv
import logging
import numpy as np
from imp_energy.accounting import account
from imp_energy.table import EnergyTable, default_table
from imp_isa.neurons import NeuronKind, NeuronModel
from imp_mapper.layers import fc_layer
from imp_runtime.engine import compile_network

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -

DEFAULT_GRID = (0.0, 0.25, 0.5, 0.75, 0.85, 1.0)
TEMPLATE_INPUTS = 128
TEMPLATE_OUTPUTS = 12


class SweepPoint:
    def __init__(self, sparsity: float, spikes: int, energy_pj: float, delay_ns: float, edp_per_neuron: float,
                 reduction_pct: float = 0.0):
        self.sparsity: float        = sparsity
        self.spikes: int            = spikes
        self.energy_pj: float       = energy_pj
        self.delay_ns: float        = delay_ns
        self.edp_per_neuron: float  = edp_per_neuron
        self.reduction_pct: float   = reduction_pct

    def __repr__(self):
        return "SweepPoint(s={:.2f}, k={}, EDP/neuron={:.2f} pJ*ns, -{:.2f}%)".format(
            self.sparsity, self.spikes, self.edp_per_neuron, self.reduction_pct)


def spiking_inputs(sparsity: float, n_inputs: int = TEMPLATE_INPUTS) -> int:
    return int(round((1.0 - sparsity) * n_inputs))


def _measure(sparsity: float, table: EnergyTable, rng: np.random.Generator, weights: np.ndarray,
             neuron: NeuronModel) -> SweepPoint:
    network = compile_network([fc_layer(weights, neuron)])
    k = spiking_inputs(sparsity)
    spikes = np.zeros(TEMPLATE_INPUTS, dtype=bool)
    spikes[rng.choice(TEMPLATE_INPUTS, size=k, replace=False)] = True
    network.engines[0].run_timestep(spikes, 0)
    report = account(network.trace, table)
    return SweepPoint(sparsity, k, report.energy_pj, report.delay_ns, report.edp / TEMPLATE_OUTPUTS)


def edp_sweep(points=DEFAULT_GRID, table: EnergyTable = None, seed: int = 0,
              neuron: NeuronModel = None) -> list:
    """=== Function name: edp_sweep ===================================================================================
    :param points: sparsities in [0, 1]
    :param neuron: update model of the group, IF with theta 64 if None
    :return: list of SweepPoint in the order given, reduction_pct relative to sparsity 0
    ==================================================================================================================="""
    points = [float(s) for s in points]
    if not points:
        raise ValueError("empty sparsity grid")
    for s in points:
        if not 0.0 <= s <= 1.0:
            raise ValueError("sparsity {} outside [0, 1]".format(s))
    table = table if table is not None else default_table()
    neuron = neuron if neuron is not None else NeuronModel(kind=NeuronKind.IF, threshold=64)
    rng = np.random.default_rng(seed)
    weights = rng.integers(-32, 32, size=(TEMPLATE_INPUTS, TEMPLATE_OUTPUTS))
    baseline = _measure(0.0, table, rng, weights, neuron).edp_per_neuron
    curve = []
    for s in points:
        point = _measure(s, table, rng, weights, neuron)
        point.reduction_pct = 100.0 * (1.0 - point.edp_per_neuron / baseline) if baseline else 0.0
        curve.append(point)
        lg.debug("sweep     : {}".format(point))
    lg.info("sweep     : {} point(s), baseline EDP/neuron {:.2f} pJ*ns".format(len(curve), baseline))
    return curve


def write_sweep_csv(path: str, curve: list):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["sparsity", "edp_pj_ns", "reduction_pct"])
        for p in curve:
            writer.writerow(["{:.4f}".format(p.sparsity), "{:.4f}".format(p.edp_per_neuron),
                             "{:.4f}".format(p.reduction_pct)])
