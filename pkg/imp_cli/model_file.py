"""=== Model file ===================================================================================================
JSON document describing a network:

    {"timesteps": 10, "strict_mode": false, "saturate": false, "energy_table": null,
     "layers": [{"kind": "FC", "in_dim": 100, "out_dim": 128,
                 "neuron": {"kind": "RMP", "threshold": 64, "leak": 0, "v_reset": 0},
                 "weights": [[...], ...]}, ...]}

A layer may also give kind / threshold / leak / v_reset flat, as "neuron_kind", "threshold", "leak", "v_reset".
==================================================================================================================="""

import json
import logging
from typing import Optional, Union
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from imp_config import conf
from imp_mapper.layers import LayerSpec
from imp_messages.errors import ModelSchemaError

# LOGGING                                                                                   logging - START -
lg = logging.getLogger(__name__)
# LOGGING                                                                                   logging - ENDED -

_FLAT_NEURON_KEYS = {"neuron_kind": "kind", "threshold": "threshold", "leak": "leak", "v_reset": "v_reset"}


class ModelFile(BaseModel):
    """=== Model name: ModelFile(BaseModel) ==============================
    Validated network description. Layer widths must chain.
    ===================================================================="""
    layers: list[LayerSpec]                         = Field(min_length=1)
    timesteps: int                                  = Field(default=conf.DEFAULT_TIMESTEPS, ge=1)
    strict_mode: bool                               = False
    saturate: bool                                  = False
    energy_table: Optional[Union[str, dict]]        = None

    @field_validator("layers", mode="before")
    @classmethod
    def _lift_flat_neuron(cls, layers):
        if not isinstance(layers, list):
            return layers
        lifted = []
        for layer in layers:
            if isinstance(layer, dict) and "neuron" not in layer and "threshold" in layer:
                layer = dict(layer)
                layer["neuron"] = {target: layer.pop(key) for key, target in _FLAT_NEURON_KEYS.items() if key in layer}
            lifted.append(layer)
        return lifted

    @model_validator(mode="after")
    def _check_chain(self):
        for k in range(1, len(self.layers)):
            if self.layers[k - 1].output_width != self.layers[k].input_width:
                raise ValueError("layer {} outputs {} neurons but layer {} takes {} inputs".format(
                    k, self.layers[k - 1].output_width, k + 1, self.layers[k].input_width))
        return self


def _field_path(err: ValidationError) -> str:
    first = err.errors()[0]
    return ".".join(str(p) for p in first.get("loc", ()))


def parse_model(data) -> ModelFile:
    try:
        return ModelFile.model_validate(data)
    except ValidationError as e:
        path = _field_path(e)
        msg = e.errors()[0].get("msg", str(e))
        lg.error("invalid   : model field '{}': {}".format(path, msg))
        raise ModelSchemaError("{}: {}".format(path or "model", msg), path)


def load_model_file(path: str) -> ModelFile:
    """=== Function name: load_model_file =============================================================================
    :raises OSError: file cannot be read
    :raises ModelSchemaError: not JSON or not a valid model; field_path names the offending entry
    ==================================================================================================================="""
    with open(path, "r") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as e:
            raise ModelSchemaError("{} is not valid JSON: {}".format(path, e))
    model = parse_model(data)
    lg.info("loaded    : {} layer(s) from {}".format(len(model.layers), path))
    return model
