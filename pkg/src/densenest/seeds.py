"""Deterministic child-seed derivation shared by data generation and the CLI."""

import hashlib

_SEED_MASK = (1 << 63) - 1


def child_seed(root: int, *parts) -> int:
    """Derive a child seed from a root seed and a label path.

    The derivation is platform-stable: the first 8 bytes (big endian) of
    SHA-256 over the UTF-8 string ``"<root>/<part>/<part>/..."``, masked to
    63 bits so the result is a valid seed everywhere.
    """
    text = "/".join([str(int(root))] + [str(p) for p in parts])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & _SEED_MASK
