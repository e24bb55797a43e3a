"""Storage layout rules and the per-contract slot store.

Words and slot keys are plain ints in ``[0, 2**256)``. Mapping slots and
long-string data locations are derived with keccak-256 by default; any
32-byte digest can be injected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from Crypto.Hash import keccak as _keccak

from gaslab.gas import (
    DEFAULT_SCHEDULE,
    GasSchedule,
    StorageCell,
    Tx,
    hash_cost,
    sload_cost,
    sstore_cost,
)
from gaslab.trace import HashOp, StorageOp

Word = int
SlotKey = int
Digest = Callable[[bytes], bytes]

WORD_BYTES = 32
WORD_MASK = (1 << 256) - 1


def keccak256(data: bytes) -> bytes:
    return _keccak.new(digest_bits=256, data=data).digest()


def word_bytes(word: Word) -> bytes:
    return word.to_bytes(WORD_BYTES, "big")


def as_word(value: int | bytes) -> Word:
    if isinstance(value, (bytes, bytearray)):
        if len(value) > WORD_BYTES:
            raise ValueError("word longer than 32 bytes")
        return int.from_bytes(value, "big")
    if not 0 <= value <= WORD_MASK:
        raise ValueError("word out of range")
    return value


@lru_cache(maxsize=1 << 16)
def _keccak_slot(data: bytes) -> SlotKey:
    return int.from_bytes(keccak256(data), "big")


def digest_slot(data: bytes, digest: Digest = keccak256) -> SlotKey:
    if digest is keccak256:
        return _keccak_slot(data)
    return int.from_bytes(digest(data), "big") & WORD_MASK


@dataclass
class ContractStorage:
    contract: str
    slots: dict = field(default_factory=dict)

    def peek(self, slot: SlotKey) -> Word:
        """Current value without pricing or warming."""
        cell = self.slots.get(slot)
        return cell.current if cell else 0

    def poke(self, slot: SlotKey, value: Word) -> None:
        """Set a value outside any transaction (setup, upgrades)."""
        self.slots[slot] = StorageCell(value, value)

    def snapshot_tx(self) -> None:
        for cell in self.slots.values():
            cell.original = cell.current

    def copy(self) -> "ContractStorage":
        return ContractStorage(
            self.contract, {k: StorageCell(c.original, c.current) for k, c in self.slots.items()}
        )

    def values(self) -> dict:
        return {k: c.current for k, c in self.slots.items() if c.current}


def read_word(storage: ContractStorage, slot: SlotKey, tx: Tx, group: str = "") -> Word:
    gas = sload_cost(tx.access, storage.contract, slot, tx.schedule)
    cell = storage.slots.get(slot)
    value = cell.current if cell else 0
    original = cell.original if cell else 0
    cold = gas == tx.schedule.cold_sload
    tx.record(StorageOp("read", storage.contract, slot, original, value, value, cold, gas, 0, group))
    return value


def write_word(
    storage: ContractStorage, slot: SlotKey, new: Word, tx: Tx, group: str = ""
) -> StorageOp:
    cell = storage.slots.get(slot)
    if cell is None:
        cell = storage.slots[slot] = StorageCell()
    old = cell.current
    cold = (storage.contract, slot) not in tx.access.warm_slots
    gas, refund = sstore_cost(cell, new, tx.access, storage.contract, slot, tx.schedule)
    tx.journal.append((storage, slot, old))
    op = StorageOp("write", storage.contract, slot, cell.original, old, new, cold, gas, refund, group)
    tx.record(op)
    return op


def mapping_slot(
    base: SlotKey,
    key: bytes,
    digest: Digest = keccak256,
    schedule: GasSchedule = DEFAULT_SCHEDULE,
) -> tuple[SlotKey, int]:
    """Slot of ``mapping[key]`` for a raw-bytes key: H(key || base)."""
    data = bytes(key) + word_bytes(base)
    return digest_slot(data, digest), hash_cost(len(data), schedule)


def hashed_mapping_slot(base: SlotKey, key: bytes, tx: Tx, digest: Digest = keccak256) -> SlotKey:
    slot, gas = mapping_slot(base, key, digest, tx.schedule)
    tx.record(HashOp(len(key) + WORD_BYTES, gas))
    return slot


def string_slot_count(char_len: int) -> int:
    if char_len < 0:
        raise ValueError("char_len must be >= 0")
    if char_len <= 31:
        return 1
    return 1 + (char_len + 31) // 32


def string_data_slot(head: SlotKey, digest: Digest = keccak256) -> SlotKey:
    return digest_slot(word_bytes(head), digest)


def encode_string(
    head: SlotKey,
    value: str | bytes,
    digest: Digest = keccak256,
    schedule: GasSchedule = DEFAULT_SCHEDULE,
) -> tuple[list[tuple[SlotKey, Word]], int]:
    """Slot/word pairs for a string stored at ``head`` plus the derivation gas."""
    data = value.encode("ascii") if isinstance(value, str) else bytes(value)
    n = len(data)
    if n <= 31:
        word = int.from_bytes(data.ljust(31, b"\0") + bytes([2 * n]), "big")
        return [(head, word)], 0
    gas = hash_cost(WORD_BYTES, schedule)
    start = string_data_slot(head, digest)
    entries = [(head, 2 * n + 1)]
    for i in range(0, n, WORD_BYTES):
        chunk = data[i : i + WORD_BYTES].ljust(WORD_BYTES, b"\0")
        entries.append(((start + i // WORD_BYTES) & WORD_MASK, int.from_bytes(chunk, "big")))
    return entries, gas


def decode_string(head_word: Word, data_words: list[Word] = ()) -> bytes:
    """Inverse of :func:`encode_string` given the head word and data words in order."""
    if head_word & 1 == 0:
        n = (head_word & 0xFF) // 2
        return word_bytes(head_word)[:n]
    n = (head_word - 1) // 2
    raw = b"".join(word_bytes(w) for w in data_words)
    return raw[:n]


def string_length(head_word: Word) -> int:
    if head_word & 1 == 0:
        return (head_word & 0xFF) // 2
    return (head_word - 1) // 2


def store_string(
    storage: ContractStorage, head: SlotKey, value: str | bytes, tx: Tx, group: str = ""
) -> list[StorageOp]:
    entries, gas = encode_string(head, value, schedule=tx.schedule)
    if gas:
        tx.record(HashOp(WORD_BYTES, gas))
    return [write_word(storage, slot, word, tx, group) for slot, word in entries]


def load_string(storage: ContractStorage, head: SlotKey, tx: Tx, group: str = "") -> bytes:
    head_word = read_word(storage, head, tx, group)
    if head_word & 1 == 0:
        return decode_string(head_word)
    n = string_length(head_word)
    tx.record(HashOp(WORD_BYTES, hash_cost(WORD_BYTES, tx.schedule)))
    start = string_data_slot(head)
    words = [
        read_word(storage, (start + i) & WORD_MASK, tx, group) for i in range((n + 31) // 32)
    ]
    return decode_string(head_word, words)


@dataclass(frozen=True)
class FileRecord:
    owner: int = 0
    content_hash: Word = 0
    created_at: int = 0
    updated_at: int = 0

    def __post_init__(self):
        if not 0 <= self.owner < 1 << 160:
            raise ValueError("owner must be a 20-byte address")
        if self.updated_at < self.created_at:
            raise ValueError("updated_at must be >= created_at")


FILE_RECORD_SLOTS = 4


def struct_layout_file(record: FileRecord, head: SlotKey) -> list[tuple[SlotKey, Word]]:
    values = (record.owner, record.content_hash, record.created_at, record.updated_at)
    return [((head + i) & WORD_MASK, v) for i, v in enumerate(values)]
