"""=== Layer mapping ================================================================================================
Compiles layers into macro allocations.

FC  : one macro per 12 outputs (output tiling). A fan-in above 128 is split across macros of the same output tile
      (input tiling); the first one owns the neurons, the others are donors whose partial sums the host merges into
      the owner at the end of every timestep.
Conv: one W row per (kernel row, kernel col, channel), up to 12 output channels per macro. Output positions become
      V contexts, 13 at a time; batches are raster-scan ordered and time-multiplexed on the macro.
==================================================================================================================="""

import logging
import math
from typing import Optional
import numpy as np
from imp_isa.neurons import ReservedRows
from imp_macro.geometry import GEOMETRY, MacroGeometry
from imp_mapper.layers import LayerKind, LayerSpec
from imp_mapper.packing import allocate_vmem, pack_w_image
from imp_messages.errors import UnsupportedLayerError

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -

ROLE_SINGLE = "single"
ROLE_OWNER = "owner"
ROLE_DONOR = "donor"


class MacroAllocation:
    """=== Class name: MacroAllocation ================================================================================
    Placement of one layer tile on one macro.
    :param w_image: np.ndarray(128, 72)     - packed weights
    :param input_map: dict                  - FC: input neuron -> w_row; Conv: kernel tap (ky, kx, c) -> w_row
    :param output_map: list                 - per weight group: FC output neuron / Conv output channel, or None
    :param v_contexts: list                 - (odd row, even row) pairs
    :param role: str                        - 'single', 'owner' (merges donors) or 'donor' (partial sums only)
    :param merge_sources: list              - macro ids of the donors an owner merges
    :param merge_scratch: tuple             - owner's (odd, even) rows receiving donor partials
    ==================================================================================================================="""
    def __init__(self,
                 macro_id: int,
                 layer_index: int,
                 w_image: np.ndarray,
                 input_map: dict,
                 output_map: list,
                 v_contexts: list,
                 reserved: ReservedRows,
                 role: str                          = ROLE_SINGLE,
                 merge_sources: Optional[list]      = None,
                 merge_scratch: Optional[tuple]     = None,
                 row_offset: int                    = 0):
        self.macro_id: int                      = macro_id
        self.layer_index: int                   = layer_index
        self.w_image: np.ndarray                = w_image
        self.input_map: dict                    = input_map
        self.output_map: list                   = output_map
        self.v_contexts: list                   = v_contexts
        self.reserved: ReservedRows             = reserved
        self.role: str                          = role
        self.merge_sources: list                = merge_sources or []
        self.merge_scratch: Optional[tuple]     = merge_scratch
        self.row_offset: int                    = row_offset

    @property
    def rows_used(self) -> int:
        return len(self.input_map)

    @property
    def groups_used(self) -> int:
        return sum(1 for o in self.output_map if o is not None)

    @property
    def holds_neurons(self) -> bool:
        return self.role != ROLE_DONOR

    def __repr__(self):
        return "MacroAllocation(id={}, layer={}, role={}, rows={}, groups={}, contexts={})".format(
            self.macro_id, self.layer_index, self.role, self.rows_used, self.groups_used, len(self.v_contexts))


class LayerMapping:
    """All allocations of one layer plus, for Conv, the pixel schedule: per batch a list of (context, (oy, ox))."""
    def __init__(self,
                 layer_index: int,
                 spec: LayerSpec,
                 allocations: list,
                 pixel_schedule: Optional[list]     = None,
                 input_tiles: int                   = 1):
        self.layer_index: int                   = layer_index
        self.spec: LayerSpec                    = spec
        self.allocations: list                  = allocations
        self.pixel_schedule: Optional[list]     = pixel_schedule
        self.input_tiles: int                   = input_tiles

    @property
    def n_macros(self) -> int:
        return len(self.allocations)

    @property
    def output_tiles(self) -> list:
        """Allocations holding neurons, in output order."""
        return [a for a in self.allocations if a.holds_neurons]


def map_fc(layer: LayerSpec, layer_index: int = 1, first_macro_id: int = 0,
           geometry: MacroGeometry = GEOMETRY) -> LayerMapping:
    """=== Function name: map_fc ======================================================================================
    Output tiling into ceil(out_dim / 12) tiles; each tile gets the full fan-in, split into ceil(in_dim / 128) row
    tiles when it exceeds one macro.
    ==================================================================================================================="""
    if layer.kind is not LayerKind.FC:
        raise ValueError("map_fc needs an FC layer, got {}".format(layer.kind.value))
    weights = layer.weight_matrix()
    per_row, per_macro = geometry.weights_per_row, geometry.w_rows
    n_out_tiles = math.ceil(layer.out_dim / per_row)
    n_in_tiles = math.ceil(layer.in_dim / per_macro)
    allocations = []
    macro_id = first_macro_id
    for o in range(n_out_tiles):
        outputs = list(range(o * per_row, min((o + 1) * per_row, layer.out_dim)))
        output_map = outputs + [None] * (per_row - len(outputs))
        tile = []
        for i in range(n_in_tiles):
            inputs = range(i * per_macro, min((i + 1) * per_macro, layer.in_dim))
            if n_in_tiles == 1:
                role = ROLE_SINGLE
            else:
                role = ROLE_OWNER if i == 0 else ROLE_DONOR
            contexts, reserved = allocate_vmem(2 if role == ROLE_OWNER else 1, geometry)
            tile.append(MacroAllocation(macro_id=macro_id,
                                        layer_index=layer_index,
                                        w_image=pack_w_image(weights[inputs.start:inputs.stop, outputs], geometry),
                                        input_map={n: n - inputs.start for n in inputs},
                                        output_map=output_map,
                                        v_contexts=contexts[:1],
                                        reserved=reserved,
                                        role=role,
                                        merge_scratch=contexts[1] if role == ROLE_OWNER else None,
                                        row_offset=inputs.start))
            macro_id += 1
        if n_in_tiles > 1:
            tile[0].merge_sources = [a.macro_id for a in tile[1:]]
        allocations.extend(tile)
    lg.info("mapped    : layer {} {} onto {} macro(s), {} input tile(s)".format(layer_index, layer.describe(),
                                                                            len(allocations), n_in_tiles))
    return LayerMapping(layer_index, layer, allocations, input_tiles=n_in_tiles)


def conv_tap_row(ky: int, kx: int, c: int, layer: LayerSpec) -> int:
    """W row of a kernel tap: (kernel row, kernel col, channel) row-major."""
    return (ky * layer.kernel_w + kx) * layer.in_channels + c


def map_conv(layer: LayerSpec, layer_index: int = 1, first_macro_id: int = 0,
             geometry: MacroGeometry = GEOMETRY) -> LayerMapping:
    """=== Function name: map_conv ====================================================================================
    One macro per 12 output channels. Output positions are assigned to V contexts in raster order, 13 per batch.
    The Conv fan-in is never tiled: kernel_h x kernel_w x in_channels above 128 is rejected.
    ==================================================================================================================="""
    if layer.kind is not LayerKind.CONV:
        raise ValueError("map_conv needs a Conv layer, got {}".format(layer.kind.value))
    if layer.fan_in > geometry.w_rows:
        raise UnsupportedLayerError("Conv fan-in {}x{}x{} = {} exceeds {} rows; reduce the input channels".format(
            layer.kernel_h, layer.kernel_w, layer.in_channels, layer.fan_in, geometry.w_rows))
    weights = layer.weight_matrix()
    per_row = geometry.weights_per_row
    capacity = geometry.max_contexts
    positions = [(oy, ox) for oy in range(layer.out_h) for ox in range(layer.out_w)]
    schedule = [[(k, pos) for k, pos in enumerate(positions[b:b + capacity])]
                for b in range(0, len(positions), capacity)]
    input_map = {(ky, kx, c): conv_tap_row(ky, kx, c, layer)
                 for ky in range(layer.kernel_h) for kx in range(layer.kernel_w) for c in range(layer.in_channels)}
    allocations = []
    for o in range(math.ceil(layer.out_channels / per_row)):
        channels = list(range(o * per_row, min((o + 1) * per_row, layer.out_channels)))
        contexts, reserved = allocate_vmem(min(capacity, len(positions)), geometry)
        allocations.append(MacroAllocation(macro_id=first_macro_id + o,
                                           layer_index=layer_index,
                                           w_image=pack_w_image(weights[:, channels], geometry),
                                           input_map=dict(input_map),
                                           output_map=channels + [None] * (per_row - len(channels)),
                                           v_contexts=contexts,
                                           reserved=reserved))
    lg.info("mapped    : layer {} {} onto {} macro(s), {} position(s) in {} batch(es)".format(
        layer_index, layer.describe(), len(allocations), len(positions), len(schedule)))
    return LayerMapping(layer_index, layer, allocations, pixel_schedule=schedule)


def map_layer(layer: LayerSpec, layer_index: int = 1, first_macro_id: int = 0,
              geometry: MacroGeometry = GEOMETRY) -> LayerMapping:
    if layer.kind is LayerKind.FC:
        return map_fc(layer, layer_index, first_macro_id, geometry)
    return map_conv(layer, layer_index, first_macro_id, geometry)


def map_network(layers: list, geometry: MacroGeometry = GEOMETRY) -> list:
    """Maps layers in order; layer indices start at 1 (0 is the input spike train), macro ids run network-wide."""
    mappings = []
    next_id = 0
    for index, layer in enumerate(layers, start=1):
        mapping = map_layer(layer, index, next_id, geometry)
        next_id += mapping.n_macros
        mappings.append(mapping)
    return mappings


def format_mapping_report(mappings: list, geometry: MacroGeometry = GEOMETRY) -> str:
    """=== Function name: format_mapping_report =======================================================================
    Text report: per layer macro count, group use of the last output tile, row utilization, V-context batches and
    the host merge plan of input-tiled layers.
    ==================================================================================================================="""
    lines = []
    total = 0
    for m in mappings:
        spec = m.spec
        tiles = m.output_tiles
        rows = max(a.rows_used for a in m.allocations)
        lines.append("layer {} {}: {} macros, last uses {}/{} groups, {}/{} rows used".format(
            m.layer_index, spec.describe(), m.n_macros, tiles[-1].groups_used, geometry.weights_per_row,
            rows, geometry.w_rows))
        if m.pixel_schedule is not None:
            sizes = [len(batch) for batch in m.pixel_schedule]
            lines.append("  {} positions in {} V-context batch(es) ({})".format(
                spec.positions, len(sizes), "+".join(str(s) for s in sizes)))
        else:
            lines.append("  {} V context(s) per macro".format(len(tiles[0].v_contexts)))
        if m.input_tiles > 1:
            lines.append("  input-tiled: {} row tiles per output tile, host merge of donor partial sums".format(
                m.input_tiles))
            for owner in tiles:
                lines.append("    owner macro {} <- donors {}".format(owner.macro_id, owner.merge_sources))
        total += m.n_macros
    lines.append("total: {} macros".format(total))
    return "\n".join(lines)
