"""=== W image packing and V_MEM allocation ========================================================================="""

import logging
import math
import numpy as np
from imp_isa.neurons import ReservedRows
from imp_macro.geometry import GEOMETRY, MacroGeometry, from_bits, to_bits
from imp_messages.errors import CapacityError, QuantizationError, ShapeMismatchError

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -


def pack_w_image(weights, geometry: MacroGeometry = GEOMETRY) -> np.ndarray:
    """=== Function name: pack_w_image ================================================================================
    Row r holds input neuron r's outgoing weights; weight group g (output neuron g) sits on columns 6g..6g+5, LSB
    first, sign on 6g+5. Even groups hang on RWLo, odd groups on RWLe by the array wiring. Unused rows and groups
    stay zero.
    :param weights: fan_in x n_out integers in [-32, 31]
    :return: np.ndarray(128, 72) of uint8 bits
    ==================================================================================================================="""
    w = np.asarray(weights)
    if w.ndim != 2:
        raise ShapeMismatchError("weights must be a fan_in x n_out matrix, got shape {}".format(w.shape))
    fan_in, n_out = w.shape
    if fan_in > geometry.w_rows or n_out > geometry.weights_per_row:
        raise CapacityError("{}x{} weight tile exceeds {}x{}".format(fan_in, n_out, geometry.w_rows,
                                                                   geometry.weights_per_row),
                            required_macros=math.ceil(fan_in / geometry.w_rows) *
                            math.ceil(n_out / geometry.weights_per_row))
    w = w.astype(np.int64)
    bad = (w < geometry.w_min) | (w > geometry.w_max)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise QuantizationError("weight [{}][{}] = {} outside [{}, {}]".format(r, c, w[r, c], geometry.w_min,
                                                                             geometry.w_max))
    image = np.zeros((geometry.w_rows, geometry.w_cols), dtype=np.uint8)
    image[:fan_in, :n_out * geometry.weight_bits] = to_bits(w, geometry.weight_bits).reshape(fan_in, -1)
    return image


def unpack_w_image(image: np.ndarray, fan_in: int, n_out: int, geometry: MacroGeometry = GEOMETRY) -> np.ndarray:
    """Inverse of pack_w_image."""
    bits = np.asarray(image)[:fan_in, :n_out * geometry.weight_bits]
    return from_bits(bits.reshape(fan_in, n_out, geometry.weight_bits))


def allocate_vmem(n_contexts: int, geometry: MacroGeometry = GEOMETRY) -> tuple:
    """=== Function name: allocate_vmem ===============================================================================
    Rows 0-5 hold threshold / leak / reset for both alignments; contexts follow as (odd, even) row pairs from row 6.
    :return: (list of (odd_row, even_row), ReservedRows)
    ==================================================================================================================="""
    capacity = geometry.max_contexts
    if n_contexts < 1:
        raise ValueError("at least one V context is needed")
    if n_contexts > capacity:
        required = math.ceil(n_contexts / capacity)
        raise CapacityError("{} V contexts exceed the {} one macro holds: use {} macros".format(
            n_contexts, capacity, required), required_macros=required)
    first = geometry.reserved_v_rows
    contexts = [(first + 2 * k, first + 2 * k + 1) for k in range(n_contexts)]
    return contexts, ReservedRows()
