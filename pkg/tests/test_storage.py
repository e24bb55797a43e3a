import hashlib

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaslab.gas import Tx
from gaslab.storage import (
    ContractStorage,
    FileRecord,
    decode_string,
    encode_string,
    keccak256,
    load_string,
    mapping_slot,
    read_word,
    store_string,
    string_slot_count,
    struct_layout_file,
    write_word,
)

ascii_text = st.text(alphabet=st.characters(min_codepoint=32, max_codepoint=126), max_size=200)


def test_keccak_reference_vector():
    assert keccak256(b"").hex() == "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"


def test_mapping_slot_matches_solidity_layout():
    # keccak256(abi.encodePacked("a.txt", uint256(3)))
    expected = int.from_bytes(keccak256(b"a.txt" + (3).to_bytes(32, "big")), "big")
    assert mapping_slot(3, b"a.txt")[0] == expected


def test_mapping_slot_deterministic_and_priced():
    assert mapping_slot(5, b"key") == mapping_slot(5, b"key")
    assert mapping_slot(0, b"x" * 31)[1] == 42
    assert mapping_slot(0, b"")[1] == 36


@given(st.binary(max_size=64), st.binary(max_size=64))
def test_mapping_slot_distinct_keys(a, b):
    if a != b:
        assert mapping_slot(1, a)[0] != mapping_slot(1, b)[0]


def test_mapping_slot_injectable_digest():
    sha = lambda data: hashlib.sha256(data).digest()  # noqa: E731
    slot, gas = mapping_slot(1, b"k", digest=sha)
    assert slot == int.from_bytes(sha(b"k" + (1).to_bytes(32, "big")), "big")
    assert gas == 42


@pytest.mark.parametrize("n, count", [(0, 1), (31, 1), (32, 2), (33, 3), (64, 3), (65, 4)])
def test_string_slot_count(n, count):
    assert string_slot_count(n) == count


def _brute_force_slot_count(n):
    """Count slots by laying bytes out one at a time."""
    if n <= 31:
        return 1
    data_slots, used_in_last = 0, 32
    for _ in range(n):
        if used_in_last == 32:
            data_slots, used_in_last = data_slots + 1, 0
        used_in_last += 1
    return 1 + data_slots


def test_string_slot_count_against_brute_force():
    steps = []
    for n in range(0, 300):
        assert string_slot_count(n) == _brute_force_slot_count(n)
        step = string_slot_count(n + 1) - string_slot_count(n)
        assert step in (0, 1)
        if step:
            steps.append(n)
    assert steps[:5] == [31, 32, 64, 96, 128]


def test_encode_empty_string():
    assert encode_string(9, "") == ([(9, 0)], 0)


def test_encode_short_string_is_one_packed_word():
    entries, gas = encode_string(9, "abc")
    assert gas == 0 and len(entries) == 1
    assert entries[0][1] == int.from_bytes(b"abc".ljust(31, b"\0") + bytes([6]), "big")


def test_encode_32_char_string():
    entries, gas = encode_string(9, "x" * 32)
    data = int.from_bytes(keccak256((9).to_bytes(32, "big")), "big")
    assert entries == [(9, 65), (data, int.from_bytes(b"x" * 32, "big"))]
    assert gas == 36


def test_encode_33_char_string_contiguous():
    entries, _ = encode_string(9, "y" * 33)
    data = int.from_bytes(keccak256((9).to_bytes(32, "big")), "big")
    assert [slot for slot, _ in entries] == [9, data, data + 1]
    assert entries[0][1] == 67


@given(ascii_text)
def test_encode_decode_roundtrip(s):
    entries, _ = encode_string(123, s)
    assert len(entries) == string_slot_count(len(s))
    words = [w for _, w in entries]
    assert decode_string(words[0], words[1:]).decode() == s


@given(ascii_text)
def test_store_load_roundtrip(s):
    store = ContractStorage("c")
    ops = store_string(store, 77, s, Tx())
    assert len(ops) == string_slot_count(len(s))
    assert load_string(store, 77, Tx()).decode() == s


@given(st.text(alphabet="abc", max_size=31))
def test_short_string_costs_one_write(s):
    store = ContractStorage("c")
    tx = Tx()
    store_string(store, 1, s, tx)
    assert len(tx.trace.storage_ops("write")) == 1


def test_struct_layout_zero_record():
    assert struct_layout_file(FileRecord(), 10) == [(10, 0), (11, 0), (12, 0), (13, 0)]


@given(st.integers(0, 2**160 - 1), st.integers(0, 2**256 - 1), st.integers(0, 2**40), st.integers(0, 100))
def test_struct_layout_contiguous(owner, h, created, delta):
    rec = FileRecord(owner, h, created, created + delta)
    layout = struct_layout_file(rec, 1000)
    assert [s for s, _ in layout] == [1000, 1001, 1002, 1003]
    assert [w for _, w in layout] == [owner, h, created, created + delta]


@given(st.integers(0, 2**64), st.integers(0, 2**64))
def test_struct_layouts_disjoint(a, b):
    if abs(a - b) >= 4:
        sa = {s for s, _ in struct_layout_file(FileRecord(), a)}
        sb = {s for s, _ in struct_layout_file(FileRecord(), b)}
        assert not sa & sb


def test_file_record_invariants():
    with pytest.raises(ValueError):
        FileRecord(updated_at=0, created_at=5)
    with pytest.raises(ValueError):
        FileRecord(owner=1 << 160)


def test_read_absent_slot():
    tx = Tx()
    assert read_word(ContractStorage("c"), 4, tx) == 0
    assert tx.meter.used == 2100


def test_write_zero_on_absent_slot():
    tx = Tx()
    op = write_word(ContractStorage("c"), 4, 0, tx)
    assert op.gas == 2200 and tx.meter.used == 2200


def test_write_then_read_warm():
    store, tx = ContractStorage("c"), Tx()
    write_word(store, 4, 0xBEEF, tx)
    assert read_word(store, 4, tx) == 0xBEEF
    assert tx.trace.ops[-1].gas == 100


def test_storage_isolation():
    a, b = ContractStorage("a"), ContractStorage("b")
    tx = Tx()
    write_word(a, 1, 5, tx)
    assert b.slots == {}
    # same slot number on another contract is still cold
    assert read_word(b, 1, tx) == 0 and tx.trace.ops[-1].cold


def test_snapshot_tx():
    store, tx = ContractStorage("c"), Tx()
    write_word(store, 1, 5, tx)
    assert store.slots[1].original == 0
    store.snapshot_tx()
    assert store.slots[1].original == 5
