"""128-bit hex identifiers, optionally seeded for reproducible ingestion runs."""

import random
import secrets
from typing import Callable

ID_BITS = 128
ID_HEX_LEN = ID_BITS // 4


class IdGenerator:
    """Yields lowercase 32-char hex ids.

    Without a seed, ids come from the OS entropy pool. With a seed the
    sequence is deterministic, which is what makes transcription runs
    reproducible byte for byte.
    """

    def __init__(self, seed: int | str | None = None):
        self._rng = random.Random(seed) if seed is not None else None

    def new_id(self) -> str:
        if self._rng is None:
            return secrets.token_hex(ID_HEX_LEN // 2)
        return format(self._rng.getrandbits(ID_BITS), "032x")

    def unique_id(self, taken: Callable[[str], bool]) -> str:
        """Draw until the id is free; deterministic given the seed and `taken`."""
        while True:
            candidate = self.new_id()
            if not taken(candidate):
                return candidate
