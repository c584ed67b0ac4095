"""=== Exhaustive arithmetic suites =================================================================================
Pushes every operand pair through the bit level sensing + adder path and compares against integer arithmetic.
Used by the test-suite and by the `selftest` CLI command.
==================================================================================================================="""

import logging
import numpy as np
from imp_macro.geometry import GEOMETRY, MacroGeometry, Parity, PARITIES, to_bits, wrap
from imp_macro.peripherals import build_adder_config, ripple_add, sense_cells, w_enable_mask

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -


def _v_rows(values: np.ndarray, parity: Parity, geometry: MacroGeometry) -> np.ndarray:
    """Batch of V rows holding values[n] in every slot of the given alignment."""
    rows = np.zeros((len(values), geometry.total_cols), dtype=np.uint8)
    bits = to_bits(values, geometry.v_bits)
    for cols in geometry.value_cols(parity):
        rows[:, cols] = bits
    return rows


def _w_rows(weights: np.ndarray, parity: Parity, geometry: MacroGeometry) -> np.ndarray:
    """Batch of W rows (padded to full width) holding weights[n] in every group of the given parity."""
    rows = np.zeros((len(weights), geometry.total_cols), dtype=np.uint8)
    bits = to_bits(weights, geometry.weight_bits)
    for g in geometry.groups_of(parity):
        rows[:, list(geometry.group_cols(g))] = bits
    return rows


def check_adder_exhaustive(geometry: MacroGeometry = GEOMETRY) -> int:
    """=== Function name: check_adder_exhaustive ======================================================================
    AccW2V arithmetic for all (V, w) pairs in both parities and all six slots.
    :return: int - number of mismatching slot results (0 expected)
    ==================================================================================================================="""
    v_all = np.arange(geometry.v_min, geometry.v_max + 1, dtype=np.int64)
    w_all = np.arange(geometry.w_min, geometry.w_max + 1, dtype=np.int64)
    v_grid, w_grid = (a.ravel() for a in np.meshgrid(v_all, w_all, indexing="ij"))
    expected = wrap(v_grid + w_grid, geometry.v_bits)
    mismatches = 0
    for parity in PARITIES:
        cells = np.stack([_w_rows(w_grid, parity, geometry), _v_rows(v_grid, parity, geometry)], axis=1)
        enable = np.stack([np.broadcast_to(w_enable_mask(geometry, parity), cells.shape[::2]),
                           np.ones(cells.shape[::2], dtype=bool)], axis=1)
        sums = ripple_add(sense_cells(cells, enable), build_adder_config("AccW2V", parity, geometry))
        mismatches += int(np.count_nonzero(sums.values != expected[:, None]))
    lg.info("exhaust.  : adder checked over {} pairs, {} mismatches".format(len(v_grid), mismatches))
    return mismatches


def check_comparator_exhaustive(geometry: MacroGeometry = GEOMETRY, theta_max: int = 512, chunk: int = 64) -> int:
    """=== Function name: check_comparator_exhaustive =================================================================
    SpikeCheck against V >= theta for V over the whole range and theta in [1, theta_max], restricted to the pairs
    where V - theta does not underflow. Theta is processed in chunks to bound memory.
    :return: int - number of mismatching spike decisions (0 expected)
    ==================================================================================================================="""
    v_all = np.arange(geometry.v_min, geometry.v_max + 1, dtype=np.int64)
    mismatches = 0
    checked = 0
    for start in range(1, theta_max + 1, chunk):
        thetas = np.arange(start, min(start + chunk, theta_max + 1), dtype=np.int64)
        v_grid, t_grid = (a.ravel() for a in np.meshgrid(v_all, thetas, indexing="ij"))
        valid = (v_grid - t_grid) >= geometry.v_min
        for parity in PARITIES:
            cells = np.stack([_v_rows(v_grid, parity, geometry), _v_rows(-t_grid, parity, geometry)], axis=1)
            enable = np.ones(cells.shape, dtype=bool)
            sums = ripple_add(sense_cells(cells, enable), build_adder_config("SpikeCheck", parity, geometry))
            spikes = sums.sign_bit == 0
            expected = (v_grid >= t_grid)[:, None]
            mismatches += int(np.count_nonzero((spikes != expected) & valid[:, None]))
        checked += int(valid.sum())
    lg.info("exhaust.  : comparator checked over {} pairs, {} mismatches".format(checked, mismatches))
    return mismatches
