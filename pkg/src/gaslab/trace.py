"""Trace elements recorded while pricing a transaction.

Every element carries the gas it was charged so a trace can be summed, and
enough raw facts (values, byte lengths, cold flags) to be re-priced from a
schedule table without the meter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union


@dataclass(frozen=True, slots=True)
class TxOp:
    """Intrinsic transaction charge: flat base plus calldata bytes."""

    base: int
    calldata: bytes
    gas: int

    kind = "tx"


@dataclass(frozen=True, slots=True)
class StorageOp:
    kind: str  # "read" | "write"
    contract: str
    slot: int
    original: int
    old: int
    new: int
    cold: bool
    gas: int
    refund: int = 0
    group: str = ""


@dataclass(frozen=True, slots=True)
class HashOp:
    byte_len: int
    gas: int

    kind = "hash"


@dataclass(frozen=True, slots=True)
class ComputeOp:
    units: int
    gas: int
    label: str = ""

    kind = "compute"


@dataclass(frozen=True, slots=True)
class CallOverheadOp:
    """Account access plus call base for a delegated call."""

    target: str
    cold: bool
    gas: int

    kind = "call"


Op = Union[TxOp, StorageOp, HashOp, ComputeOp, CallOverheadOp]


@dataclass
class OpTrace:
    ops: list = field(default_factory=list)
    value: Any = None
    reverted: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.reverted is None

    @property
    def gas(self) -> int:
        return sum(op.gas for op in self.ops)

    @property
    def intrinsic(self) -> int:
        return sum(op.gas for op in self.ops if isinstance(op, TxOp))

    @property
    def refund(self) -> int:
        return sum(op.refund for op in self.ops if isinstance(op, StorageOp))

    def storage_ops(self, kind: Optional[str] = None) -> list[StorageOp]:
        return [
            op
            for op in self.ops
            if isinstance(op, StorageOp) and (kind is None or op.kind == kind)
        ]

    def write_groups(self) -> list[str]:
        """Distinct write groups in first-seen order."""
        seen: list[str] = []
        for op in self.storage_ops("write"):
            if op.group not in seen:
                seen.append(op.group)
        return seen


def op_target(op: Op) -> str:
    if isinstance(op, StorageOp):
        return f"{op.contract}:{op.slot:#066x}"
    if isinstance(op, CallOverheadOp):
        return op.target
    if isinstance(op, HashOp):
        return f"{op.byte_len}B"
    if isinstance(op, ComputeOp):
        return f"{op.units}u"
    return f"{len(op.calldata)}B"


def op_cold(op: Op) -> Optional[bool]:
    """Cold flag for storage and call ops; None where warmth does not apply."""
    return getattr(op, "cold", None)


def trace_rows(trace: OpTrace) -> list[dict]:
    """One dict per element: index, kind, target, cold, gas, cumulative."""
    rows = []
    total = 0
    for i, op in enumerate(trace.ops):
        total += op.gas
        rows.append(
            {
                "index": i,
                "kind": op.kind,
                "target": op_target(op),
                "cold": op_cold(op),
                "gas": op.gas,
                "cumulative": total,
            }
        )
    return rows


def _temperature(cold: Optional[bool]) -> str:
    if cold is None:
        return "-"
    return "cold" if cold else "warm"


def format_trace(trace: OpTrace) -> str:
    lines = [
        f"{r['index']:>3} {r['kind']:<7} {r['target']} "
        f"{_temperature(r['cold'])} {r['gas']} {r['cumulative']}"
        for r in trace_rows(trace)
    ]
    outcome = "ok" if trace.ok else f"reverted({trace.reverted})"
    lines.append(f"outcome {outcome}")
    return "\n".join(lines) + "\n"
