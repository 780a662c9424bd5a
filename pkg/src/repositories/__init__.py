from .artifact_repository import ArtifactRepository
from .matrix_repository import MatrixRepository

__all__ = ["ArtifactRepository", "MatrixRepository"]
