"""The invertible pipeline.

Six stages, each with an exact inverse: pad, substitute, sliding
byte-window permutation, sliding bit-window permutation, keystream
combine. encrypt composes them in that order; decrypt applies the
inverses in reverse order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sliding
from .bits import bits_to_bytes, bytes_to_bits
from .envelope import CipherEnvelope
from .errors import CorruptionError, RuleMismatchError
from .keymat import RULE_A, RULES, KeySet, SubstitutionTable, WindowPermutation
from .keystream import RbsLoop

__all__ = [
    "PAD_BYTE",
    "PAD_WIDTH",
    "PaddedMessage",
    "pad",
    "unpad",
    "substitute",
    "unsubstitute",
    "sliding_byte_permute",
    "sliding_byte_unpermute",
    "sliding_bit_permute",
    "sliding_bit_unpermute",
    "keystream_combine",
    "encrypt",
    "decrypt",
]

PAD_BYTE = 0x20
PAD_WIDTH = 10


@dataclass(frozen=True)
class PaddedMessage:
    """A message brought up to the minimum window width.

    The pad count travels alongside the bytes (and later in the
    envelope header) so that removal is exact even for short messages
    that genuinely end in whitespace.
    """

    data: bytes
    pad_count: int

    def __post_init__(self):
        if not 0 <= self.pad_count <= PAD_WIDTH:
            raise CorruptionError(f"pad count {self.pad_count} outside 0..{PAD_WIDTH}")
        if len(self.data) < PAD_WIDTH:
            raise CorruptionError(f"padded message holds {len(self.data)} bytes, minimum is {PAD_WIDTH}")
        if self.pad_count:
            if len(self.data) != PAD_WIDTH:
                raise CorruptionError("a nonzero pad count requires exactly 10 bytes")
            if any(b != PAD_BYTE for b in self.data[-self.pad_count:]):
                raise CorruptionError("pad count inconsistent with trailing bytes")


def pad(message: bytes) -> PaddedMessage:
    """Append 0x20 bytes until the message reaches 10 bytes.

    Messages of 10 bytes or more pass through untouched with a pad
    count of zero.
    """
    if len(message) >= PAD_WIDTH:
        return PaddedMessage(bytes(message), 0)
    count = PAD_WIDTH - len(message)
    return PaddedMessage(bytes(message) + bytes([PAD_BYTE]) * count, count)


def unpad(padded: PaddedMessage) -> bytes:
    """Drop exactly pad_count trailing bytes."""
    if padded.pad_count == 0:
        return padded.data
    return padded.data[:-padded.pad_count]


def substitute(data: bytes, table: SubstitutionTable) -> bytes:
    """Replace every byte through the forward table."""
    return data.translate(table.forward)


def unsubstitute(data: bytes, table: SubstitutionTable) -> bytes:
    """Replace every byte through the inverse table."""
    return data.translate(table.inverse)


def sliding_byte_permute(data: bytes, perm: WindowPermutation) -> bytes:
    """Apply perm to every width-wide byte window, left to right."""
    if len(data) < perm.width:
        raise ValueError(f"need at least {perm.width} bytes, got {len(data)}")
    arr = np.frombuffer(data, dtype=np.uint8)
    return sliding.apply_forward(arr, perm.map).tobytes()


def sliding_byte_unpermute(data: bytes, perm: WindowPermutation) -> bytes:
    """Exact inverse of sliding_byte_permute for the same perm."""
    if len(data) < perm.width:
        raise ValueError(f"need at least {perm.width} bytes, got {len(data)}")
    arr = np.frombuffer(data, dtype=np.uint8)
    return sliding.apply_backward(arr, perm.map).tobytes()


def sliding_bit_permute(bits: np.ndarray, perm: WindowPermutation) -> np.ndarray:
    """Apply perm to every width-wide bit window, left to right."""
    if bits.size < perm.width:
        raise ValueError(f"need at least {perm.width} bits, got {bits.size}")
    return sliding.apply_forward(np.ascontiguousarray(bits, dtype=np.uint8), perm.map)


def sliding_bit_unpermute(bits: np.ndarray, perm: WindowPermutation) -> np.ndarray:
    """Exact inverse of sliding_bit_permute for the same perm."""
    if bits.size < perm.width:
        raise ValueError(f"need at least {perm.width} bits, got {bits.size}")
    return sliding.apply_backward(np.ascontiguousarray(bits, dtype=np.uint8), perm.map)


def keystream_combine(bits: np.ndarray, rbs: RbsLoop, offset: int, rule: str) -> np.ndarray:
    """Combine a bit buffer with the loop fragment starting at offset.

    Rule B gives 1 where the bits differ (plain xor); rule A gives 1
    where they are equal, the bitwise complement of rule B. Either rule
    is its own inverse for a fixed (rbs, offset, rule), which is exactly
    how decryption undoes this stage.
    """
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}")
    if not 0 <= offset < rbs.length:
        raise ValueError(f"offset {offset} outside [0, {rbs.length})")
    buf = np.ascontiguousarray(bits, dtype=np.uint8)
    mixed = np.bitwise_xor(buf, rbs.fragment(offset, int(buf.size)))
    if rule == RULE_A:
        mixed = np.bitwise_xor(mixed, 1)
    return mixed


def encrypt(message: bytes, keyset: KeySet, offset: int) -> CipherEnvelope:
    """Run the full pipeline; offset picks where keystream drawing starts.

    Deterministic for a fixed (message, keyset, offset). Callers wanting
    distinct ciphertexts per send must draw a fresh offset each time.
    """
    padded = pad(message)
    substituted = substitute(padded.data, keyset.sub)
    scrambled = sliding_byte_permute(substituted, keyset.byte_perm)
    bit_state = sliding_bit_permute(bytes_to_bits(scrambled), keyset.bit_perm)
    combined = keystream_combine(bit_state, keyset.rbs, offset, keyset.rule)
    return CipherEnvelope(
        rule_echo=keyset.rule,
        pad_count=padded.pad_count,
        start_offset=offset,
        payload=bits_to_bytes(combined),
    )


def decrypt(envelope: CipherEnvelope, keyset: KeySet) -> bytes:
    """Exact inverse of encrypt under the same keyset."""
    if envelope.rule_echo != keyset.rule:
        raise RuleMismatchError(
            f"envelope was made under rule {envelope.rule_echo}, keyset holds rule {keyset.rule}")
    if not 0 <= envelope.start_offset < keyset.rbs.length:
        raise ValueError(f"start offset {envelope.start_offset} outside the RBS loop")
    bit_state = keystream_combine(
        bytes_to_bits(envelope.payload), keyset.rbs, envelope.start_offset, keyset.rule)
    unshuffled = sliding_bit_unpermute(bit_state, keyset.bit_perm)
    descrambled = sliding_byte_unpermute(bits_to_bytes(unshuffled), keyset.byte_perm)
    return unpad(PaddedMessage(unsubstitute(descrambled, keyset.sub), envelope.pad_count))
