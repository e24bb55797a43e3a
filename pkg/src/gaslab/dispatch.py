"""Pattern envelopes: Classic direct calls, UUPS proxy and Diamond dispatch.

Also prices deployment and upgrade transactions, and keeps a small
:class:`World` that carries storage across upgrades the way each pattern
does.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from gaslab.app import (
    DEFAULT_CALLER,
    DEFAULT_COSTS,
    AppCosts,
    AppVersion,
    CallRequest,
    encode_calldata,
    execute,
    function_selector,
    version_functions,
)
from gaslab.gas import DEFAULT_SCHEDULE, GasSchedule, Tx, account_access_cost
from gaslab.storage import (
    ContractStorage,
    hashed_mapping_slot,
    keccak256,
    mapping_slot,
    read_word,
    write_word,
)
from gaslab.trace import CallOverheadOp, ComputeOp, OpTrace


class Pattern(str, Enum):
    CLASSIC = "classic"
    PROXY = "proxy"
    DIAMOND = "diamond"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, value) -> "Pattern":
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown pattern {value!r}") from None


def _named_slot(label: str, minus_one: bool = False) -> int:
    slot = int.from_bytes(keccak256(label.encode()), "big")
    return slot - 1 if minus_one else slot


IMPLEMENTATION_SLOT = _named_slot("eip1967.proxy.implementation", minus_one=True)
OWNER_SLOT = _named_slot("gaslab.ownable.owner")
INITIALIZED_SLOT = _named_slot("gaslab.initializable.initialized")
SELECTOR_TABLE_SLOT = _named_slot("diamond.standard.diamond.storage")

UNPACK_UNITS = 2


def address_of(contract: str) -> int:
    return int.from_bytes(keccak256(contract.encode())[12:], "big")


# Contracts created by each version's deployment or upgrade, in deployment order.
CONTRACTS = {
    (Pattern.CLASSIC, AppVersion.V1): ("notary-v1",),
    (Pattern.CLASSIC, AppVersion.V2): ("notary-v2",),
    (Pattern.CLASSIC, AppVersion.V3): ("notary-v3",),
    (Pattern.PROXY, AppVersion.V1): ("impl-v1", "proxy"),
    (Pattern.PROXY, AppVersion.V2): ("impl-v2",),
    (Pattern.PROXY, AppVersion.V3): ("impl-v3",),
    (Pattern.DIAMOND, AppVersion.V1): ("cut-facet", "loupe-facet", "diamond", "notary-facet-v1"),
    (Pattern.DIAMOND, AppVersion.V2): ("notary-facet-v2",),
    (Pattern.DIAMOND, AppVersion.V3): ("file-facet-v3", "view-facet-v3"),
}

BUILTIN_SIGNATURES = {
    "cut-facet": ("diamondCut((address,uint8,bytes4[])[],address,bytes)",),
    "loupe-facet": (
        "facets()",
        "facetFunctionSelectors(address)",
        "facetAddresses()",
        "facetAddress(bytes4)",
        "supportsInterface(bytes4)",
    ),
}


def facet_routes(version: AppVersion) -> dict[str, str]:
    """App function -> facet for the diamond at ``version``."""
    version = AppVersion(version)
    if version == AppVersion.V3:
        return {
            "addFile": "file-facet-v3",
            "updateFile": "file-facet-v3",
            "getFileName": "view-facet-v3",
            "getFileHash": "view-facet-v3",
            "compareHashes": "view-facet-v3",
        }
    facet = f"notary-facet-v{int(version)}"
    return {fn: facet for fn in version_functions(version)}


def implementation_of(pattern: Pattern, version: AppVersion) -> str:
    if pattern == Pattern.CLASSIC:
        return f"notary-v{int(version)}"
    if pattern == Pattern.PROXY:
        return f"impl-v{int(version)}"
    return "diamond"


def app_contract(pattern: Pattern, version: AppVersion) -> str:
    """Contract whose storage holds the application's data."""
    if pattern == Pattern.CLASSIC:
        return f"notary-v{int(version)}"
    return "proxy" if pattern == Pattern.PROXY else "diamond"


@dataclass(frozen=True)
class ContractSpec:
    id: str
    deployed_size: int = 0
    initcode_size: int = 0
    initcode_nonzero_fraction: float = 0.85
    # slot writes performed by the constructor, priced into deployment
    constructor_writes: tuple = ()

    def __post_init__(self):
        if self.deployed_size < 0 or self.initcode_size < 0:
            raise ValueError(f"{self.id}: sizes must be >= 0")
        if self.deployed_size > self.initcode_size:
            raise ValueError(f"{self.id}: deployed_size exceeds initcode_size")
        if not 0.0 <= self.initcode_nonzero_fraction <= 1.0:
            raise ValueError(f"{self.id}: initcode_nonzero_fraction outside [0, 1]")

    def initcode(self) -> bytes:
        """Synthetic initcode with the configured share of nonzero bytes."""
        nonzero = int(self.initcode_size * self.initcode_nonzero_fraction + 0.5)
        return b"\x01" * nonzero + b"\x00" * (self.initcode_size - nonzero)


@dataclass(frozen=True)
class CutEntry:
    selector: bytes
    facet: str
    replace: bool = False


@dataclass(frozen=True)
class DeploymentPlan:
    pattern: Pattern
    version: AppVersion
    contracts: tuple = ()
    cut: tuple = ()
    pointer_update: bool = False
    pointer_target: str = ""

    def __post_init__(self):
        n = len(self.contracts)
        if self.pattern == Pattern.CLASSIC and self.contracts and n != 1:
            raise ValueError("classic plans deploy exactly one contract")
        if self.pattern != Pattern.DIAMOND and self.cut:
            raise ValueError("only diamond plans carry cut operations")
        if self.pattern != Pattern.PROXY and self.pointer_update:
            raise ValueError("only proxy plans update an implementation pointer")

    @property
    def cut_operations(self) -> int:
        return len(self.cut)


def selector_entry(facet: str, position: int) -> int:
    """Packed selector-table word: facet address in the low 20 bytes, position above."""
    return address_of(facet) | (position << 160)


def _signature_selector(signature: str) -> bytes:
    return keccak256(signature.encode())[:4]


def _constructor_writes(pattern: Pattern, contract: str) -> tuple:
    if pattern == Pattern.PROXY and contract == "proxy":
        return (
            (IMPLEMENTATION_SLOT, address_of("impl-v1")),
            (OWNER_SLOT, DEFAULT_CALLER),
            (INITIALIZED_SLOT, 1),
        )
    if pattern == Pattern.PROXY:
        # implementation constructors lock their own initializer
        return ((INITIALIZED_SLOT, 0xFF),)
    if pattern == Pattern.DIAMOND and contract == "diamond":
        writes = [(OWNER_SLOT, DEFAULT_CALLER)]
        position = 0
        for facet, signatures in BUILTIN_SIGNATURES.items():
            for sig in signatures:
                slot, _ = mapping_slot(SELECTOR_TABLE_SLOT, _signature_selector(sig))
                writes.append((slot, selector_entry(facet, position)))
                position += 1
        return tuple(writes)
    return ()


def _contract_spec(pattern, version, name, sizes) -> ContractSpec:
    try:
        entry = sizes[str(pattern)][str(version)][name]
    except KeyError:
        raise ValueError(f"code size table lacks {pattern}/{version}/{name}") from None
    return ContractSpec(
        id=name,
        deployed_size=int(entry["deployed_size"]),
        initcode_size=int(entry["initcode_size"]),
        initcode_nonzero_fraction=float(entry.get("initcode_nonzero_fraction", 0.85)),
        constructor_writes=_constructor_writes(pattern, name),
    )


def _default_sizes() -> dict:
    from gaslab.calibrate import paper_code_sizes

    return paper_code_sizes()


def _diamond_cut(version: AppVersion, previous: Optional[AppVersion]) -> tuple:
    routes = facet_routes(version)
    existing = set(version_functions(previous)) if previous else set()
    return tuple(
        CutEntry(function_selector(fn), facet, replace=fn in existing)
        for fn, facet in routes.items()
    )


def initial_plan(pattern, sizes: dict | None = None) -> DeploymentPlan:
    pattern = Pattern.parse(pattern)
    sizes = sizes if sizes is not None else _default_sizes()
    contracts = tuple(
        _contract_spec(pattern, AppVersion.V1, name, sizes)
        for name in CONTRACTS[(pattern, AppVersion.V1)]
    )
    cut = _diamond_cut(AppVersion.V1, None) if pattern == Pattern.DIAMOND else ()
    return DeploymentPlan(pattern, AppVersion.V1, contracts, cut)


def upgrade_plan(pattern, from_version, to_version, sizes: dict | None = None) -> DeploymentPlan:
    pattern = Pattern.parse(pattern)
    src, dst = AppVersion.parse(from_version), AppVersion.parse(to_version)
    if int(dst) != int(src) + 1:
        raise ValueError(f"invalid transition {src} -> {dst}")
    sizes = sizes if sizes is not None else _default_sizes()
    contracts = tuple(
        _contract_spec(pattern, dst, name, sizes) for name in CONTRACTS[(pattern, dst)]
    )
    if pattern == Pattern.PROXY:
        return DeploymentPlan(
            pattern, dst, contracts, pointer_update=True, pointer_target=f"impl-v{int(dst)}"
        )
    if pattern == Pattern.DIAMOND:
        return DeploymentPlan(pattern, dst, contracts, _diamond_cut(dst, src))
    return DeploymentPlan(pattern, dst, contracts)


def version_plan(pattern, version, sizes: dict | None = None) -> DeploymentPlan:
    version = AppVersion.parse(version)
    if version == AppVersion.V1:
        return initial_plan(pattern, sizes)
    return upgrade_plan(pattern, AppVersion(version - 1), version, sizes)


def _word(value: int) -> bytes:
    return value.to_bytes(32, "big")


def cut_calldata(cut: tuple) -> bytes:
    payload = _signature_selector(BUILTIN_SIGNATURES["cut-facet"][0])
    groups: dict[tuple[str, bool], list[bytes]] = {}
    for entry in cut:
        groups.setdefault((entry.facet, entry.replace), []).append(entry.selector)
    for (facet, replace), selectors in groups.items():
        payload += _word(address_of(facet)) + _word(1 if replace else 0) + _word(len(selectors))
        payload += b"".join(s.ljust(32, b"\0") for s in selectors)
    return payload + _word(0) + _word(0)


def pointer_calldata(target: str) -> bytes:
    return _signature_selector("upgradeTo(address)") + _word(address_of(target))


def contract_deploy_gas(spec: ContractSpec, schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    tx = Tx(schedule)
    tx.charge_intrinsic(spec.initcode())
    tx.meter.charge(schedule.tx_create + schedule.code_deposit_per_byte * spec.deployed_size)
    scratch = ContractStorage(spec.id)
    for slot, word in spec.constructor_writes:
        write_word(scratch, slot, word, tx, "constructor")
    return tx.finalize()


def cut_gas(cut: tuple, schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    if not cut:
        return 0
    tx = Tx(schedule)
    tx.charge_intrinsic(cut_calldata(cut))
    table = ContractStorage("diamond")
    for position, entry in enumerate(cut):
        slot, _ = mapping_slot(SELECTOR_TABLE_SLOT, entry.selector)
        if entry.replace:
            table.poke(slot, selector_entry("previous-facet", position))
        write_word(table, slot, selector_entry(entry.facet, position), tx, "selectors")
    return tx.finalize()


def pointer_update_gas(target: str, schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    tx = Tx(schedule)
    tx.charge_intrinsic(pointer_calldata(target))
    proxy = ContractStorage("proxy")
    proxy.poke(IMPLEMENTATION_SLOT, address_of("previous-implementation"))
    write_word(proxy, IMPLEMENTATION_SLOT, address_of(target), tx, "pointer")
    return tx.finalize()


def deploy_gas(plan: DeploymentPlan, schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    total = sum(contract_deploy_gas(spec, schedule) for spec in plan.contracts)
    total += cut_gas(plan.cut, schedule)
    if plan.pointer_update:
        total += pointer_update_gas(plan.pointer_target, schedule)
    return total


@dataclass
class DispatchState:
    pattern: Pattern
    implementation: str = ""
    facets: dict = field(default_factory=dict)  # selector -> facet id

    def route(self, selector: bytes) -> Optional[str]:
        if self.pattern == Pattern.DIAMOND:
            return self.facets.get(selector)
        return self.implementation


def dispatch_trace(
    pattern: Pattern, selector: bytes, state: DispatchState, storage: ContractStorage, tx: Tx
) -> OpTrace:
    """Record the envelope ops of ``pattern`` into ``tx``; Classic adds nothing."""
    if pattern == Pattern.PROXY:
        read_word(storage, IMPLEMENTATION_SLOT, tx, "dispatch")
        _delegate(state.implementation, tx)
    elif pattern == Pattern.DIAMOND:
        slot = hashed_mapping_slot(SELECTOR_TABLE_SLOT, selector, tx)
        entry = read_word(storage, slot, tx, "dispatch")
        tx.record(ComputeOp(UNPACK_UNITS, UNPACK_UNITS * tx.schedule.compute_unit, "unpack"))
        facet = state.route(selector)
        if entry == 0 or facet is None:
            tx.revert("unknown-selector")
            return tx.trace
        _delegate(facet, tx)
    return tx.trace


def _delegate(target: str, tx: Tx) -> None:
    access = account_access_cost(tx.access, target, tx.schedule)
    cold = access == tx.schedule.cold_account_access
    tx.record(CallOverheadOp(target, cold, access + tx.schedule.call_base))


class World:
    """One deployed instance of the application under a pattern.

    Storage is kept per contract. Upgrades follow the pattern: Classic
    moves to a fresh contract, Proxy and Diamond keep the storage-holding
    contract and rewrite its pointer or selector table.
    """

    def __init__(
        self,
        pattern,
        sizes: dict | None = None,
        schedule: GasSchedule = DEFAULT_SCHEDULE,
        costs: AppCosts = DEFAULT_COSTS,
    ):
        self.pattern = Pattern.parse(pattern)
        self.sizes = sizes if sizes is not None else _default_sizes()
        self.schedule = schedule
        self.costs = costs
        self.version = AppVersion.V1
        self.storages: dict[str, ContractStorage] = {}
        self.dispatch = DispatchState(self.pattern)
        self.deployments: list[int] = []
        plan = initial_plan(self.pattern, self.sizes)
        self.deployments.append(deploy_gas(plan, schedule))
        self._apply(plan)

    @classmethod
    def at_version(cls, pattern, version, **kwargs) -> "World":
        world = cls(pattern, **kwargs)
        while world.version < AppVersion.parse(version):
            world.upgrade()
        return world

    @property
    def app_storage(self) -> ContractStorage:
        return self.storage(app_contract(self.pattern, self.version))

    def storage(self, contract: str) -> ContractStorage:
        if contract not in self.storages:
            self.storages[contract] = ContractStorage(contract)
        return self.storages[contract]

    def _apply(self, plan: DeploymentPlan) -> None:
        for spec in plan.contracts:
            store = self.storage(spec.id)
            for slot, word in spec.constructor_writes:
                store.poke(slot, word)
        if self.pattern == Pattern.PROXY:
            if plan.pointer_update:
                self.storage("proxy").poke(IMPLEMENTATION_SLOT, address_of(plan.pointer_target))
            self.dispatch.implementation = implementation_of(self.pattern, plan.version)
        elif self.pattern == Pattern.DIAMOND:
            table = self.storage("diamond")
            for position, entry in enumerate(plan.cut):
                slot, _ = mapping_slot(SELECTOR_TABLE_SLOT, entry.selector)
                table.poke(slot, selector_entry(entry.facet, position))
                self.dispatch.facets[entry.selector] = entry.facet
        else:
            self.dispatch.implementation = implementation_of(self.pattern, plan.version)

    def upgrade(self) -> int:
        if self.version == AppVersion.V3:
            raise ValueError("no version after V3")
        plan = upgrade_plan(self.pattern, self.version, AppVersion(self.version + 1), self.sizes)
        gas = deploy_gas(plan, self.schedule)
        self.version = plan.version
        self._apply(plan)
        self.deployments.append(gas)
        return gas

    def call(self, call: CallRequest) -> tuple[int, OpTrace]:
        return external_call_gas(self, call)

    def copy(self) -> "World":
        return copy.deepcopy(self)


def external_call_gas(world: World, call: CallRequest) -> tuple[int, OpTrace]:
    """Price one external call as its own transaction; returns (total, trace)."""
    tx = Tx(world.schedule)
    tx.charge_intrinsic(encode_calldata(call))
    storage = world.app_storage
    dispatch_trace(world.pattern, function_selector(call.function), world.dispatch, storage, tx)
    if tx.trace.ok:
        execute(world.version, call, storage, tx, world.costs)
    tx.commit()
    return tx.finalize(), tx.trace
