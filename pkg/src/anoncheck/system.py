"""Finite interpreted systems.

A system is a finite set of runs, each carrying ground facts of the form
"agent performed action", together with one indistinguishability partition
of the runs per observer.  Everything downstream (formula evaluation,
property checking, composition) is defined over this structure.

Facts are run-level: whether agent i performed action a does not change
within a run, so no point-in-time index is kept.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


class ValidationError(ValueError):
    """Raised when a system declaration is inconsistent."""


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*\Z")

#: Roles an agent may be tagged with.  Tags are metadata used by schema
#: inference and the file format; the semantics never depend on them.
ROLES = ("real", "pseudo", "observer")


@dataclass(frozen=True, order=True)
class Action:
    """An action family plus one parameter, e.g. use(k1).

    ``param`` is the empty string for parameterless actions, and the empty
    string is reserved: it cannot be used as an explicit parameter name.
    """

    family: str
    param: str = ""

    def __str__(self) -> str:
        return f"{self.family}({self.param})" if self.param else self.family

    @classmethod
    def parse(cls, text: str) -> "Action":
        text = text.strip()
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_-]*)(?:\(([A-Za-z_][A-Za-z0-9_-]*)\))?", text)
        if not m:
            raise ValidationError(f"malformed action {text!r}")
        return cls(m.group(1), m.group(2) or "")


#: A ground fact: (performing agent, action).
Fact = tuple[str, Action]


@dataclass(frozen=True)
class Run:
    """One run: an identifier and the set of facts true in it."""

    run_id: str
    facts: frozenset[Fact]

    def holds(self, agent: str, action: Action) -> bool:
        return (agent, action) in self.facts


@dataclass(frozen=True)
class ObserverPartition:
    """An observer's indistinguishability partition over run ids."""

    observer: str
    blocks: tuple[frozenset[str], ...]


def _coerce_action(value) -> Action:
    if isinstance(value, Action):
        return value
    if isinstance(value, str):
        return Action.parse(value)
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return Action(str(value[0]), str(value[1]))
    raise ValidationError(f"cannot interpret {value!r} as an action")


class InterpretedSystem:
    """An immutable interpreted system with precomputed kernel indexes.

    Use :func:`build_system` instead of constructing directly; the builder
    validates the declaration and normalizes input forms.
    """

    __slots__ = (
        "name", "agents", "roles", "actions", "runs", "observers",
        "_run_index", "_blocks", "_block_of",
    )

    def __init__(self, name: str, agents: tuple[str, ...], roles: dict[str, str | None],
                 actions: tuple[Action, ...], runs: tuple[Run, ...],
                 observers: dict[str, ObserverPartition]):
        self.name = name
        self.agents = agents
        self.roles = roles
        self.actions = actions
        self.runs = runs
        self.observers = observers
        self._run_index = {r.run_id: i for i, r in enumerate(runs)}
        # Per observer: blocks as tuples of Run (declaration order inside a
        # block) and a map run_id -> block position.
        self._blocks: dict[str, tuple[tuple[Run, ...], ...]] = {}
        self._block_of: dict[str, dict[str, int]] = {}
        for obs, part in observers.items():
            blocks = []
            block_of = {}
            for bi, block in enumerate(part.blocks):
                members = tuple(sorted((self.run(rid) for rid in block),
                                       key=lambda r: self._run_index[r.run_id]))
                blocks.append(members)
                for rid in block:
                    block_of[rid] = bi
            self._blocks[obs] = tuple(blocks)
            self._block_of[obs] = block_of

    # -- lookups ---------------------------------------------------------

    def run(self, run_id: str) -> Run:
        try:
            return self.runs[self._run_index[run_id]]
        except KeyError:
            raise ValidationError(f"unknown run {run_id!r} in system {self.name!r}") from None

    def has_agent(self, name: str) -> bool:
        return name in self.roles

    def has_action(self, action: Action) -> bool:
        return action in self._action_set()

    def _action_set(self) -> frozenset[Action]:
        # Cached lazily on the class-level dict would need another slot;
        # actions tuples are tiny, so a set build per call is acceptable for
        # the rare validation paths that use it.
        return frozenset(self.actions)

    def agents_with_role(self, role: str) -> tuple[str, ...]:
        return tuple(a for a in self.agents if self.roles.get(a) == role)

    def block_index(self, observer: str, run_id: str) -> int:
        try:
            return self._block_of[observer][run_id]
        except KeyError:
            if observer not in self.observers:
                raise ValidationError(f"{observer!r} is not a declared observer") from None
            raise ValidationError(f"unknown run {run_id!r}") from None

    def kernel(self, observer: str, run: Run | str) -> tuple[Run, ...]:
        """All runs the observer cannot distinguish from ``run`` (inclusive)."""
        rid = run if isinstance(run, str) else run.run_id
        return self._blocks[observer][self.block_index(observer, rid)]

    def holds(self, run: Run | str, agent: str, action: Action | str) -> bool:
        r = self.run(run) if isinstance(run, str) else run
        return r.holds(agent, _coerce_action(action))

    # -- equality: structural, ignoring declaration-order differences in the
    # agent/action lists and block ordering, but keeping run order (run order
    # is semantically relevant for counterexample determinism, and two
    # systems that disagree on it are reported unequal).

    def _key(self):
        return (
            frozenset(self.agents),
            frozenset((a, self.roles.get(a)) for a in self.agents),
            frozenset(self.actions),
            tuple((r.run_id, r.facts) for r in self.runs),
            frozenset((obs, frozenset(part.blocks))
                      for obs, part in self.observers.items()),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, InterpretedSystem):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self) -> str:
        return (f"InterpretedSystem({self.name!r}, {len(self.agents)} agents, "
                f"{len(self.actions)} actions, {len(self.runs)} runs)")


def _check_name(name: str, what: str) -> str:
    if not isinstance(name, str) or not _NAME_RE.match(name):
        raise ValidationError(f"bad {what} name {name!r}")
    return name


def build_system(*, agents, actions, runs, observers, name: str = "system") -> InterpretedSystem:
    """Validated constructor.

    ``agents``: iterable of names or (name, role) pairs; role in
    :data:`ROLES` or None.
    ``actions``: iterable of :class:`Action`, "family(param)" strings, or
    (family, param) pairs.
    ``runs``: ordered iterable of (run_id, facts) where each fact is
    (agent, action-like).
    ``observers``: mapping observer name -> iterable of blocks, each block an
    iterable of run ids.  Every observer's blocks must partition the full
    run set exactly.
    """
    agent_list: list[str] = []
    roles: dict[str, str | None] = {}
    for entry in agents:
        if isinstance(entry, str):
            agent, role = entry, None
        else:
            agent, role = entry
        _check_name(agent, "agent")
        if role is not None and role not in ROLES:
            raise ValidationError(f"unknown role {role!r} for agent {agent!r}")
        if agent in roles:
            raise ValidationError(f"duplicate agent {agent!r}")
        agent_list.append(agent)
        roles[agent] = role
    if not agent_list:
        raise ValidationError("a system needs at least one agent")

    action_list: list[Action] = []
    action_set: set[Action] = set()
    for entry in actions:
        act = _coerce_action(entry)
        if act in action_set:
            raise ValidationError(f"duplicate action {act}")
        action_list.append(act)
        action_set.add(act)

    run_list: list[Run] = []
    run_ids: set[str] = set()
    for run_id, facts in runs:
        _check_name(run_id, "run")
        if run_id in run_ids:
            raise ValidationError(f"duplicate run id {run_id!r}")
        run_ids.add(run_id)
        norm: set[Fact] = set()
        for fact in facts:
            agent, act = fact[0], _coerce_action(fact[1] if len(fact) == 2 else fact[1:])
            if agent not in roles:
                raise ValidationError(f"undeclared agent {agent!r} in run {run_id!r}")
            if act not in action_set:
                raise ValidationError(f"undeclared action {act} in run {run_id!r}")
            norm.add((agent, act))
        run_list.append(Run(run_id, frozenset(norm)))
    if not run_list:
        raise ValidationError("a system needs at least one run")

    partitions: dict[str, ObserverPartition] = {}
    for obs, blocks in observers.items():
        if obs not in roles:
            raise ValidationError(f"observer {obs!r} is not a declared agent")
        if obs in partitions:
            raise ValidationError(f"duplicate partition for observer {obs!r}")
        seen: set[str] = set()
        norm_blocks: list[frozenset[str]] = []
        for block in blocks:
            ids = frozenset(block)
            if not ids:
                raise ValidationError(f"empty indistinguishability block for {obs!r}")
            for rid in ids:
                if rid not in run_ids:
                    raise ValidationError(f"unknown run {rid!r} in partition of {obs!r}")
                if rid in seen:
                    raise ValidationError(f"run {rid!r} appears in two blocks of {obs!r}")
            seen |= ids
            norm_blocks.append(ids)
        missing = run_ids - seen
        if missing:
            names = ", ".join(sorted(missing))
            raise ValidationError(f"partition of {obs!r} does not cover runs: {names}")
        # Canonical block order: by first member in run declaration order.
        order = {rid: i for i, rid in enumerate(r.run_id for r in run_list)}
        norm_blocks.sort(key=lambda b: min(order[rid] for rid in b))
        partitions[obs] = ObserverPartition(obs, tuple(norm_blocks))
    if not partitions:
        raise ValidationError("a system needs at least one observer partition")

    return InterpretedSystem(name, tuple(agent_list), roles, tuple(action_list),
                             tuple(run_list), partitions)


def kernel(system: InterpretedSystem, observer: str, run: Run | str) -> tuple[Run, ...]:
    """Module-level alias of :meth:`InterpretedSystem.kernel`."""
    return system.kernel(observer, run)


def holds(system: InterpretedSystem, run: Run | str, agent: str, action: Action | str) -> bool:
    """Module-level alias of :meth:`InterpretedSystem.holds`."""
    return system.holds(run, agent, action)
