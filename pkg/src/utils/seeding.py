"""Deterministic seed derivation for laws and trials."""
import hashlib
import json

import numpy as np


def derive_seed(seed: int, *labels) -> int:
    """64-bit sub-seed from a base seed and labels, stable across runs and platforms."""
    key_string = json.dumps([int(seed), *[str(label) for label in labels]], ensure_ascii=True)
    digest = hashlib.sha256(key_string.encode("utf-8")).hexdigest()
    return int(digest[:16], 16)


def trial_rng(law_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([law_seed, trial_index]))
