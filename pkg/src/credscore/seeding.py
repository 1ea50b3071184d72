import hashlib

import numpy as np


def derive_seed(master: int, label: str, index: int = 0) -> int:
    """Mix a master seed with a component label and index into a 64-bit seed."""
    h = hashlib.blake2b(f"{int(master)}/{label}/{int(index)}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def derive_rng(master: int, label: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, label, index))
