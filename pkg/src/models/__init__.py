"""Models package."""
from src.models.schemas import MatrixFile, RunManifest

__all__ = ["MatrixFile", "RunManifest"]
