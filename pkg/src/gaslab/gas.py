"""Gas rule table and per-transaction metering.

Defaults follow the London schedule (EIP-2929 access pricing, EIP-3529
refunds). Every constant can be overridden through the scenario file.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

from gaslab.trace import OpTrace, TxOp


@dataclass(frozen=True)
class GasSchedule:
    tx_intrinsic: int = 21000
    tx_create: int = 32000
    calldata_zero_byte: int = 4
    calldata_nonzero_byte: int = 16
    cold_sload: int = 2100
    warm_sload: int = 100
    cold_account_access: int = 2600
    warm_account_access: int = 100
    sstore_set: int = 20000
    sstore_reset: int = 2900
    sstore_noop: int = 100
    refund_clear: int = 4800
    refund_cap_divisor: int = 5
    hash_base: int = 30
    hash_per_word: int = 6
    code_deposit_per_byte: int = 200
    compute_unit: int = 12
    call_base: int = 100

    def __post_init__(self):
        errors = self.violations()
        if errors:
            raise ValueError("invalid gas schedule: " + "; ".join(errors))

    def violations(self) -> list[str]:
        errors = []
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or isinstance(value, bool):
                errors.append(f"{f.name} must be an integer")
            elif value < 0:
                errors.append(f"{f.name} must be >= 0")
        if errors:
            return errors
        if self.refund_cap_divisor < 1:
            errors.append("refund_cap_divisor must be >= 1")
        if self.cold_sload <= self.warm_sload:
            errors.append("cold_sload must exceed warm_sload")
        if self.cold_account_access <= self.warm_account_access:
            errors.append("cold_account_access must exceed warm_account_access")
        return errors

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict | None, base: "GasSchedule | None" = None) -> "GasSchedule":
        """Build a schedule from a partial mapping; omitted fields keep ``base``."""
        base = base or cls()
        data = data or {}
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown schedule fields: {', '.join(unknown)}")
        merged = base.to_dict()
        merged.update(data)
        return cls(**merged)


DEFAULT_SCHEDULE = GasSchedule()


@dataclass
class AccessSet:
    warm_slots: set = field(default_factory=set)
    warm_accounts: set = field(default_factory=set)


@dataclass
class GasMeter:
    used: int = 0
    refund_counter: int = 0

    def charge(self, gas: int) -> None:
        if gas < 0:
            raise ValueError("gas charge must be non-negative")
        self.used += gas

    def adjust_refund(self, delta: int) -> None:
        self.refund_counter += delta


@dataclass
class StorageCell:
    original: int = 0
    current: int = 0


def sload_cost(
    access: AccessSet, contract: str, slot: int, schedule: GasSchedule = DEFAULT_SCHEDULE
) -> int:
    key = (contract, slot)
    if key in access.warm_slots:
        return schedule.warm_sload
    access.warm_slots.add(key)
    return schedule.cold_sload


def sstore_cost(
    cell: StorageCell,
    new: int,
    access: AccessSet,
    contract: str,
    slot: int,
    schedule: GasSchedule = DEFAULT_SCHEDULE,
) -> tuple[int, int]:
    """Net-metered SSTORE price. Returns ``(gas, refund_delta)`` and updates ``cell``."""
    key = (contract, slot)
    cost = 0
    if key not in access.warm_slots:
        access.warm_slots.add(key)
        cost = schedule.cold_sload

    original, current = cell.original, cell.current
    refund = 0
    if new == current:
        cost += schedule.sstore_noop
    elif current == original:
        if original == 0:
            cost += schedule.sstore_set
        else:
            cost += schedule.sstore_reset
            if new == 0:
                refund += schedule.refund_clear
    else:
        cost += schedule.sstore_noop
        if original != 0:
            if current == 0:
                refund -= schedule.refund_clear
            if new == 0:
                refund += schedule.refund_clear
        if new == original:
            if original == 0:
                refund += schedule.sstore_set - schedule.sstore_noop
            else:
                refund += schedule.sstore_reset - schedule.sstore_noop
    cell.current = new
    return cost, refund


def account_access_cost(
    access: AccessSet, contract: str, schedule: GasSchedule = DEFAULT_SCHEDULE
) -> int:
    if contract in access.warm_accounts:
        return schedule.warm_account_access
    access.warm_accounts.add(contract)
    return schedule.cold_account_access


def hash_cost(byte_len: int, schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    if byte_len < 0:
        raise ValueError("byte_len must be >= 0")
    return schedule.hash_base + schedule.hash_per_word * ((byte_len + 31) // 32)


def calldata_cost(payload: bytes, schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    zeros = payload.count(0)
    nonzero = len(payload) - zeros
    return zeros * schedule.calldata_zero_byte + nonzero * schedule.calldata_nonzero_byte


def finalize_tx(meter: GasMeter, schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    """Gas charged after applying the capped refund."""
    refund = max(meter.refund_counter, 0)
    return meter.used - min(refund, meter.used // schedule.refund_cap_divisor)


class Tx:
    """One transaction: schedule, fresh access set, meter and the trace being recorded."""

    def __init__(self, schedule: GasSchedule = DEFAULT_SCHEDULE):
        self.schedule = schedule
        self.access = AccessSet()
        self.meter = GasMeter()
        self.trace = OpTrace()
        # (storage, slot, previous current) for rollback on revert
        self.journal: list = []
        self.intrinsic = 0

    def record(self, op) -> None:
        self.meter.charge(op.gas)
        refund = getattr(op, "refund", 0)
        if refund:
            self.meter.adjust_refund(refund)
        self.trace.ops.append(op)

    def charge_intrinsic(self, calldata: bytes) -> int:
        gas = self.schedule.tx_intrinsic + calldata_cost(calldata, self.schedule)
        self.record(TxOp(self.schedule.tx_intrinsic, bytes(calldata), gas))
        self.intrinsic += gas
        return gas

    def revert(self, reason: str) -> None:
        """Undo storage writes and drop refunds; gas already charged stays."""
        for storage, slot, previous in reversed(self.journal):
            storage.slots[slot].current = previous
        self.journal.clear()
        self.meter.refund_counter = 0
        self.trace.reverted = reason

    def commit(self) -> None:
        """End of transaction: touched cells take their current value as original."""
        for storage, slot, _ in self.journal:
            cell = storage.slots[slot]
            cell.original = cell.current
        self.journal.clear()

    def finalize(self) -> int:
        return finalize_tx(self.meter, self.schedule)
