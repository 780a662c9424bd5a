from .matrix_codec import decode_matrix, encode_matrix
from .seeding import derive_seed, trial_rng

__all__ = [
    "decode_matrix",
    "encode_matrix",
    "derive_seed",
    "trial_rng",
]
