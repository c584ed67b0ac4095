"""=== Layer descriptions ===========================================================================================
FC and Conv layers as the model file states them. Weights are fan_in x n_out integer matrices; for Conv the fan-in
rows are ordered (kernel row, kernel col, channel), row-major.
==================================================================================================================="""

from enum import Enum
from typing import Annotated, Optional
import numpy as np
from pydantic import BaseModel, Field, model_validator
from imp_isa.neurons import NeuronModel


class LayerKind(str, Enum):
    FC = "FC"
    CONV = "Conv"


Weight = Annotated[int, Field(ge=-32, le=31)]


class LayerSpec(BaseModel):
    """=== Model name: LayerSpec(BaseModel) ==============================
    One layer. FC uses in_dim / out_dim, Conv uses the feature map and
    kernel fields. Weights are optional for mapping-only use (zeros).
    ===================================================================="""
    kind: LayerKind
    neuron: NeuronModel
    # FC
    in_dim: Optional[int]           = Field(default=None, ge=1)
    out_dim: Optional[int]          = Field(default=None, ge=1)
    # Conv
    in_channels: Optional[int]      = Field(default=None, ge=1)
    in_h: Optional[int]             = Field(default=None, ge=1)
    in_w: Optional[int]             = Field(default=None, ge=1)
    kernel_h: Optional[int]         = Field(default=None, ge=1)
    kernel_w: Optional[int]         = Field(default=None, ge=1)
    out_channels: Optional[int]     = Field(default=None, ge=1)
    stride: int                     = Field(default=1, ge=1)
    padding: int                    = Field(default=0, ge=0)

    weights: Optional[list[list[Weight]]] = None

    @model_validator(mode="after")
    def _check_shape(self):
        if self.kind is LayerKind.FC:
            if self.in_dim is None or self.out_dim is None:
                raise ValueError("FC layer needs in_dim and out_dim")
        else:
            missing = [name for name in ("in_channels", "in_h", "in_w", "kernel_h", "kernel_w", "out_channels")
                       if getattr(self, name) is None]
            if missing:
                raise ValueError("Conv layer misses {}".format(", ".join(missing)))
            if self.out_h < 1 or self.out_w < 1:
                raise ValueError("Conv kernel larger than the padded input")
        if self.weights is not None:
            if len(self.weights) != self.fan_in:
                raise ValueError("weights need {} rows (fan-in), got {}".format(self.fan_in, len(self.weights)))
            for r, row in enumerate(self.weights):
                if len(row) != self.n_out:
                    raise ValueError("weights row {} needs {} entries, got {}".format(r, self.n_out, len(row)))
        return self

    # --------------------------------------------------------------------------------------------------- shapes
    @property
    def fan_in(self) -> int:
        if self.kind is LayerKind.FC:
            return self.in_dim
        return self.kernel_h * self.kernel_w * self.in_channels

    @property
    def n_out(self) -> int:
        """Output neurons per position: out_dim (FC) or out_channels (Conv)."""
        return self.out_dim if self.kind is LayerKind.FC else self.out_channels

    @property
    def out_h(self) -> int:
        return (self.in_h + 2 * self.padding - self.kernel_h) // self.stride + 1 if self.kind is LayerKind.CONV else 1

    @property
    def out_w(self) -> int:
        return (self.in_w + 2 * self.padding - self.kernel_w) // self.stride + 1 if self.kind is LayerKind.CONV else 1

    @property
    def positions(self) -> int:
        return self.out_h * self.out_w

    @property
    def input_width(self) -> int:
        return self.in_dim if self.kind is LayerKind.FC else self.in_h * self.in_w * self.in_channels

    @property
    def output_width(self) -> int:
        return self.out_dim if self.kind is LayerKind.FC else self.positions * self.out_channels

    def weight_matrix(self) -> np.ndarray:
        if self.weights is None:
            return np.zeros((self.fan_in, self.n_out), dtype=np.int64)
        return np.asarray(self.weights, dtype=np.int64).reshape(self.fan_in, self.n_out)

    def describe(self) -> str:
        if self.kind is LayerKind.FC:
            return "FC {}->{}".format(self.in_dim, self.out_dim)
        return "Conv {}ch {}x{} -> {}ch ({}x{} out)".format(self.in_channels, self.kernel_h, self.kernel_w,
                                                             self.out_channels, self.out_h, self.out_w)


def fc_layer(weights, neuron: NeuronModel) -> LayerSpec:
    """Convenience constructor from a fan_in x n_out matrix."""
    weights = np.asarray(weights, dtype=np.int64)
    return LayerSpec(kind=LayerKind.FC, neuron=neuron, in_dim=weights.shape[0], out_dim=weights.shape[1],
                     weights=weights.tolist())
