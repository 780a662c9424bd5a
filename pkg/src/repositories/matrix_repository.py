import json
import logging
import os

import numpy as np
from pydantic import ValidationError

from src.core.errors import MatrixFileError
from src.models.schemas import MatrixFile

logger = logging.getLogger(__name__)


class MatrixRepository:
    """Reads and writes MatrixFile JSON documents."""

    def load(self, path: str) -> np.ndarray:
        try:
            with open(path, "r", encoding="utf-8") as file:
                payload = json.load(file)
        except FileNotFoundError:
            raise MatrixFileError(f"Matrix file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise MatrixFileError(f"Matrix file {path} is not valid JSON: {e.msg}") from None

        try:
            matrix = MatrixFile.model_validate(payload)
        except ValidationError as e:
            raise MatrixFileError(f"Matrix file {path} is invalid: {e.error_count()} validation error(s)") from e
        logger.debug(f"Loaded {matrix.rows}x{matrix.cols} matrix from {path}")
        return matrix.to_array()

    def save(self, path: str, M) -> str:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        payload = MatrixFile.from_array(M).model_dump(mode="json")
        temp_path = f"{path}.tmp"
        with open(temp_path, "w", encoding="utf-8") as file:
            json.dump(payload, file, indent=2, sort_keys=True)
        os.replace(temp_path, path)
        return path
