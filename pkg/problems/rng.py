"""
Seeded random streams.

Every generator in the project is a counter-based ``Philox`` stream derived
from an integer seed. Instance generators add a purpose tag so that, e.g., a
QUBO and a Max-Cut graph drawn from the same seed are independent; replica
streams are spawned children of the run seed.
"""
import zlib

import numpy as np


def tag_key(tag):
    """Stable 32-bit key for a purpose tag."""
    return zlib.crc32(tag.encode("utf-8"))


def make_rng(seed, tag):
    """Generator for ``(seed, tag)``; identical on every platform."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=(tag_key(tag),))
    return np.random.Generator(np.random.Philox(sequence))


def spawn_sequences(seed, count):
    """``count`` independent child seed sequences of ``seed``."""
    return np.random.SeedSequence(int(seed)).spawn(int(count))


def rng_from_sequence(sequence):
    return np.random.Generator(np.random.Philox(sequence))


def sequence_fingerprint(sequence):
    """64-bit word identifying a child seed sequence (printed in run configs)."""
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
