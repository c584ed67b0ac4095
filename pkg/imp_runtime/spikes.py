"""=== Spike trains, run statistics and their file formats ==========================================================
Spike file:   one event per line, t<TAB>layer<TAB>neuron. Layer 0 is the input train, layer k the output of the k-th
              mapped layer. The same format is read and written, so runs can be chained.
V trace CSV:  t,layer,neuron,v_value
==================================================================================================================="""

import csv
import logging
from collections import Counter
from typing import Optional
import numpy as np
from imp_messages.errors import ShapeMismatchError

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -


class SpikeTrain:
    """=== Class name: SpikeTrain =====================================================================================
    Binary spikes over timesteps, per layer: spikes[layer] is a (T, width) bool array.
    ==================================================================================================================="""
    def __init__(self, spikes: Optional[dict] = None):
        self.spikes: dict = {}
        for layer, arr in (spikes or {}).items():
            self.add_layer(layer, arr)

    def add_layer(self, layer: int, arr):
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ShapeMismatchError("layer {} spikes must be (T, width), got {}".format(layer, arr.shape))
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ShapeMismatchError("layer {} spikes hold values other than 0/1".format(layer))
        if self.spikes and arr.shape[0] != self.timesteps:
            raise ShapeMismatchError("layer {} has {} timesteps, train has {}".format(layer, arr.shape[0],
                                                                                   self.timesteps))
        self.spikes[int(layer)] = arr.astype(bool)

    @property
    def timesteps(self) -> int:
        if not self.spikes:
            return 0
        return next(iter(self.spikes.values())).shape[0]

    @property
    def layers(self) -> list:
        return sorted(self.spikes)

    def width(self, layer: int) -> int:
        return self.spikes[layer].shape[1]

    def at(self, t: int, layer: int) -> np.ndarray:
        return self.spikes[layer][t]

    def events(self, layers: Optional[list] = None) -> list:
        """(t, layer, neuron) triples, sorted by t, then layer, then neuron."""
        chosen = self.layers if layers is None else sorted(layers)
        out = []
        for t in range(self.timesteps):
            for layer in chosen:
                out.extend((t, layer, int(n)) for n in np.flatnonzero(self.spikes[layer][t]))
        return out

    @classmethod
    def from_events(cls, events, widths: dict, timesteps: int) -> "SpikeTrain":
        arrays = {layer: np.zeros((timesteps, width), dtype=bool) for layer, width in widths.items()}
        for t, layer, neuron in events:
            if layer not in arrays:
                continue
            if not 0 <= t < timesteps or not 0 <= neuron < widths[layer]:
                raise ShapeMismatchError("event (t={}, layer={}, neuron={}) outside {} timesteps x {} neurons".format(
                    t, layer, neuron, timesteps, widths[layer]))
            arrays[layer][t, neuron] = True
        return cls(arrays)


class RunStats:
    """=== Class name: RunStats =======================================================================================
    Per layer, per timestep spike counts (layer 0 = input), instruction counts by kind and overflow events.
    ==================================================================================================================="""
    def __init__(self):
        self.spike_counts: dict             = {}
        self.widths: dict                   = {}
        self.instruction_counts: Counter    = Counter()
        self.overflow_events: int           = 0

    def record_spikes(self, layer: int, t: int, spikes: np.ndarray):
        counts = self.spike_counts.setdefault(layer, [])
        while len(counts) <= t:
            counts.append(0)
        counts[t] = int(np.count_nonzero(spikes))
        self.widths[layer] = int(len(spikes))

    def record_trace(self, trace: list):
        for event in trace:
            self.instruction_counts[event.kind] += 1
            self.overflow_events += event.overflow


class SparsityTable:
    def __init__(self, per_layer: dict, overall: float):
        self.per_layer: dict    = per_layer
        self.overall: float     = overall

    def layer_mean(self, layer: int) -> float:
        values = self.per_layer[layer]
        return float(np.mean(values)) if values else 1.0


def compute_sparsity(stats: RunStats) -> SparsityTable:
    """=== Function name: compute_sparsity ============================================================================
    Sparsity = 1 - spikes / width per layer and timestep. The overall figure weighs every neuron-timestep equally.
    ==================================================================================================================="""
    per_layer = {}
    spikes_total, slots_total = 0, 0
    for layer in sorted(stats.spike_counts):
        width = stats.widths[layer]
        counts = stats.spike_counts[layer]
        per_layer[layer] = [1.0 - c / width for c in counts]
        spikes_total += sum(counts)
        slots_total += width * len(counts)
    overall = 1.0 - spikes_total / slots_total if slots_total else 1.0
    return SparsityTable(per_layer, overall)


# FILE IO                                                                                   io      - START -

def read_spike_file(path: str, widths: dict, timesteps: int) -> SpikeTrain:
    """Reads t<TAB>layer<TAB>neuron lines. Only the layers named in widths are kept; blank and # lines are skipped."""
    events = []
    with open(path, "r") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ShapeMismatchError("{}:{}: expected t<TAB>layer<TAB>neuron".format(path, lineno))
            try:
                events.append(tuple(int(f) for f in fields))
            except ValueError:
                raise ShapeMismatchError("{}:{}: non-integer field".format(path, lineno))
    lg.debug("read      : {} spike events from {}".format(len(events), path))
    return SpikeTrain.from_events(events, widths, timesteps)


def write_spike_file(path: str, train: SpikeTrain, layers: Optional[list] = None):
    with open(path, "w", newline="") as handle:
        for t, layer, neuron in train.events(layers):
            handle.write("{}\t{}\t{}\n".format(t, layer, neuron))


def write_vtrace_csv(path: str, rows: list):
    """rows: (t, layer, neuron, v_value) tuples."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t", "layer", "neuron", "v_value"])
        writer.writerows(rows)

# FILE IO                                                                                   io      - ENDED -
