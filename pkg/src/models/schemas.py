import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.utils.matrix_codec import decode_matrix, encode_matrix


class MatrixFile(BaseModel):
    """Dense complex matrix as row-major [re, im] pairs."""
    rows: int = Field(..., ge=1, description="Number of rows")
    cols: int = Field(..., ge=1, description="Number of columns")
    data: List[Tuple[float, float]] = Field(..., description="Row-major [re, im] pairs")

    model_config = ConfigDict(extra="forbid")

    @field_validator("data")
    def validate_finite(cls, v):
        for re, im in v:
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ValueError("matrix entries must be finite")
        return v

    @model_validator(mode="after")
    def validate_length(self):
        if len(self.data) != self.rows * self.cols:
            raise ValueError(f"data has {len(self.data)} entries, expected rows*cols = {self.rows * self.cols}")
        return self

    @classmethod
    def from_array(cls, M) -> "MatrixFile":
        return cls(**encode_matrix(M))

    def to_array(self) -> np.ndarray:
        return decode_matrix(self.model_dump())


class RunManifest(BaseModel):
    command: str = Field(..., min_length=1)
    arguments: Dict[str, Any] = Field(default_factory=dict)
    tolerance_overrides: Dict[str, float] = Field(default_factory=dict)
    seed: Optional[int] = None
    version: str
    timestamp: str

    model_config = ConfigDict(extra="forbid")
