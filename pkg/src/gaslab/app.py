"""The notarization application as trace generators.

Each function call, given the storage it runs against, emits the storage
reads/writes, hashes and compute steps its logic performs. Dispatch and
transaction costs are added by :mod:`gaslab.dispatch`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from enum import IntEnum

from gaslab.gas import Tx
from gaslab.storage import (
    ContractStorage,
    FileRecord,
    hashed_mapping_slot,
    keccak256,
    load_string,
    read_word,
    store_string,
    struct_layout_file,
    write_word,
)
from gaslab.trace import ComputeOp, OpTrace


class AppVersion(IntEnum):
    V1 = 1
    V2 = 2
    V3 = 3

    def __str__(self) -> str:
        return self.name

    @classmethod
    def parse(cls, value) -> "AppVersion":
        if isinstance(value, AppVersion):
            return value
        text = str(value).strip().upper()
        if text.startswith("V"):
            text = text[1:]
        try:
            return cls(int(text))
        except ValueError:
            raise ValueError(f"unknown version {value!r}") from None


SIGNATURES = {
    "addFile": "addFile(string,bytes32)",
    "updateFile": "updateFile(string,bytes32)",
    "getFileName": "getFileName(string)",
    "getFileHash": "getFileHash(string)",
    "compareHashes": "compareHashes(bytes32,bytes32)",
}
FUNCTIONS = tuple(SIGNATURES)

# storage bases of the application's mappings
NAMES_SLOT = 0
HASHES_SLOT = 1
FILES_SLOT = 2

# Foundry's default test sender
DEFAULT_CALLER = 0x1804C8AB1F12E6BBF3894D4083F33E07309D1F38


def version_functions(version: AppVersion) -> tuple[str, ...]:
    if version == AppVersion.V1:
        return tuple(f for f in FUNCTIONS if f != "updateFile")
    return FUNCTIONS


def function_selector(function: str) -> bytes:
    try:
        signature = SIGNATURES[function]
    except KeyError:
        raise ValueError(f"unknown function {function!r}") from None
    return keccak256(signature.encode())[:4]


@dataclass(frozen=True)
class AppCosts:
    """Compute-unit budgets for logic below storage/hash granularity."""

    entry_units: int = 16  # selector matching, ABI decoding, memory setup
    add_units: int = 20
    update_units: int = 12
    view_units: int = 6
    compare_units: int = 8
    access_check_units: int = 10  # extra per V3 owner check

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict | None) -> "AppCosts":
        data = data or {}
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown app cost fields: {', '.join(unknown)}")
        values = {**asdict(cls()), **data}
        bad = [k for k, v in values.items() if not isinstance(v, int) or v < 0]
        if bad:
            raise ValueError(f"app cost fields must be non-negative integers: {', '.join(bad)}")
        return cls(**values)


DEFAULT_COSTS = AppCosts()


@dataclass(frozen=True)
class CallRequest:
    function: str
    name: str = ""
    hash: int = 0
    other_hash: int = 0  # second argument of compareHashes
    caller: int = DEFAULT_CALLER
    timestamp: int = 1


def _word(value: int) -> bytes:
    return value.to_bytes(32, "big")


def encode_calldata(call: CallRequest) -> bytes:
    """Selector plus ABI-encoded arguments."""
    selector = function_selector(call.function)
    if call.function == "compareHashes":
        return selector + _word(call.hash) + _word(call.other_hash)
    name = call.name.encode("ascii")
    tail = _word(len(name)) + name.ljust(-(-len(name) // 32) * 32, b"\0")
    if call.function in ("addFile", "updateFile"):
        return selector + _word(0x40) + _word(call.hash) + tail
    return selector + _word(0x20) + tail


def _compute(tx: Tx, units: int, label: str) -> None:
    if units:
        tx.record(ComputeOp(units, units * tx.schedule.compute_unit, label))


def execute(
    version: AppVersion,
    call: CallRequest,
    storage: ContractStorage,
    tx: Tx,
    costs: AppCosts = DEFAULT_COSTS,
) -> OpTrace:
    """Run one application call against ``storage``, recording into ``tx``."""
    version = AppVersion(version)
    _compute(tx, costs.entry_units, "entry")
    if call.function not in version_functions(version):
        tx.revert("unknown-function")
        return tx.trace

    key = call.name.encode("ascii")
    fn = call.function
    if fn == "compareHashes":
        _compute(tx, costs.compare_units, "body")
        tx.trace.value = call.hash == call.other_hash
    elif fn == "getFileName":
        _compute(tx, costs.view_units, "body")
        head = hashed_mapping_slot(NAMES_SLOT, key, tx)
        tx.trace.value = load_string(storage, head, tx, "names").decode("ascii")
    elif version < AppVersion.V3:
        _execute_flat(fn, call, key, storage, tx, costs)
    else:
        _execute_records(fn, call, key, storage, tx, costs)
    return tx.trace


def _execute_flat(fn, call, key, storage, tx, costs) -> None:
    if fn == "addFile":
        _compute(tx, costs.add_units, "body")
        head = hashed_mapping_slot(NAMES_SLOT, key, tx)
        store_string(storage, head, call.name, tx, "names")
        slot = hashed_mapping_slot(HASHES_SLOT, key, tx)
        write_word(storage, slot, call.hash, tx, "hashes")
        tx.trace.value = True
    elif fn == "updateFile":
        _compute(tx, costs.update_units, "body")
        slot = hashed_mapping_slot(HASHES_SLOT, key, tx)
        write_word(storage, slot, call.hash, tx, "hashes")
        tx.trace.value = True
    elif fn == "getFileHash":
        _compute(tx, costs.view_units, "body")
        slot = hashed_mapping_slot(HASHES_SLOT, key, tx)
        tx.trace.value = read_word(storage, slot, tx, "hashes")


def _execute_records(fn, call, key, storage, tx, costs) -> None:
    if fn == "getFileHash":
        _compute(tx, costs.view_units, "body")
        head = hashed_mapping_slot(FILES_SLOT, key, tx)
        value = read_word(storage, head + 1, tx, "record")
        if value == 0:
            # files notarized before the record layout live in the flat mapping
            slot = hashed_mapping_slot(HASHES_SLOT, key, tx)
            value = read_word(storage, slot, tx, "hashes")
        tx.trace.value = value
        return

    units = costs.add_units if fn == "addFile" else costs.update_units
    _compute(tx, units + costs.access_check_units, "body")
    if fn == "addFile":
        names_head = hashed_mapping_slot(NAMES_SLOT, key, tx)
    head = hashed_mapping_slot(FILES_SLOT, key, tx)
    owner = read_word(storage, head, tx, "record")

    if fn == "addFile":
        if owner not in (0, call.caller):
            tx.revert("not-owner")
            return
        store_string(storage, names_head, call.name, tx, "names")
        record = FileRecord(call.caller, call.hash, call.timestamp, call.timestamp)
        for slot, word in struct_layout_file(record, head):
            write_word(storage, slot, word, tx, "record")
    else:
        if owner != call.caller:
            tx.revert("not-owner")
            return
        write_word(storage, head + 1, call.hash, tx, "record")
        write_word(storage, head + 3, call.timestamp, tx, "record")
    tx.trace.value = True
