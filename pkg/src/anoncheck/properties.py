"""Anonymity-family properties compiled to epistemic formulas.

Every property is an implication guarded by the fact under scrutiny: a
property of (subject, action) holds vacuously in systems where the subject
never performs the action.  The compiled formulas are the single source of
truth; :func:`check_property` walks the same structure to report the first
failing conjunct.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .formula import (And, Atom, Evaluator, Formula, Implies, Knows, Not,
                      Poss, conj, render)
from .system import Action, InterpretedSystem, ValidationError


class PropertyKind(Enum):
    ANONYMOUS_UP_TO = "anonymous-up-to"
    MINIMALLY_ANONYMOUS = "minimally-anonymous"
    PRIVATE_UP_TO = "private-up-to"
    MINIMALLY_PRIVATE = "minimally-private"
    ROLE_INTERCHANGEABLE = "role-interchangeable"
    MAXIMALLY_ONYMOUS = "maximally-onymous"
    MAXIMALLY_IDENTIFIED = "maximally-identified"


#: Per kind: (required set field, additionally permitted set fields).
_SET_FIELDS = ("anonymity_set", "privacy_set", "action_universe")
_FIELD_RULES: dict["PropertyKind", tuple[str | None, frozenset[str]]] = {}


@dataclass(frozen=True)
class PropertySpec:
    """What to check: a kind, the scrutinized (subject, action), the observer,
    and the kind-specific universe.

    ``anonymity_set``: candidate performers, required for ANONYMOUS_UP_TO.
    ``privacy_set``: candidate actions, required for PRIVATE_UP_TO.
    ``action_universe``: for ROLE_INTERCHANGEABLE only; defaults to all
    declared actions of the system.  A set field that the kind does not use
    must be left unset.
    """

    kind: PropertyKind
    subject: str
    action: Action
    observer: str
    anonymity_set: tuple[str, ...] | None = None
    privacy_set: tuple[Action, ...] | None = None
    action_universe: tuple[Action, ...] | None = None

    def __post_init__(self):
        required, optional = _FIELD_RULES[self.kind]
        for field in _SET_FIELDS:
            value = getattr(self, field)
            if field == required and value is None:
                raise ValidationError(f"{self.kind.value} needs {field}")
            if value is None:
                continue
            if field != required and field not in optional:
                raise ValidationError(f"{self.kind.value} does not take {field}")
            if not isinstance(value, tuple):
                object.__setattr__(self, field, tuple(value))


_FIELD_RULES.update({
    PropertyKind.ANONYMOUS_UP_TO: ("anonymity_set", frozenset()),
    PropertyKind.MINIMALLY_ANONYMOUS: (None, frozenset()),
    PropertyKind.PRIVATE_UP_TO: ("privacy_set", frozenset()),
    PropertyKind.MINIMALLY_PRIVATE: (None, frozenset()),
    PropertyKind.ROLE_INTERCHANGEABLE: (None, frozenset({"action_universe"})),
    PropertyKind.MAXIMALLY_ONYMOUS: (None, frozenset()),
    PropertyKind.MAXIMALLY_IDENTIFIED: (None, frozenset()),
})


@dataclass(frozen=True)
class PropertyReport:
    #: The checked PropertySpec, or a descriptive label for non-property
    #: checks (independence variants, structural conditions) that reuse
    #: this report shape.
    spec: "PropertySpec | str"
    holds: bool
    witness_formula: Formula
    #: (run id, failing conjunct description) for the first failing run in
    #: declaration order and the first failing conjunct in expansion order.
    counterexample: tuple[str, str] | None


def _ordered_agents(system: InterpretedSystem, names) -> tuple[str, ...]:
    given = set(names)
    for n in given:
        if not system.has_agent(n):
            raise ValidationError(f"undeclared agent {n!r} in property universe")
    return tuple(a for a in system.agents if a in given)


def _ordered_actions(system: InterpretedSystem, acts) -> tuple[Action, ...]:
    given = set(acts)
    for a in given:
        if not system.has_action(a):
            raise ValidationError(f"undeclared action {a} in property universe")
    return tuple(a for a in system.actions if a in given)


def _conjuncts(system: InterpretedSystem, spec: PropertySpec) -> list[tuple[str, Formula]]:
    """(description, formula) pairs in fixed expansion order: agents first,
    then actions, each in system declaration order."""
    kind = spec.kind
    subject, action, j = spec.subject, spec.action, spec.observer
    if not system.has_agent(subject):
        raise ValidationError(f"undeclared agent {subject!r}")
    if not system.has_action(action):
        raise ValidationError(f"undeclared action {action}")
    if j not in system.observers:
        raise ValidationError(f"{j!r} has no declared partition")

    if kind is PropertyKind.ANONYMOUS_UP_TO:
        return [(i2, Poss(j, Atom(i2, action)))
                for i2 in _ordered_agents(system, spec.anonymity_set)]
    if kind is PropertyKind.PRIVATE_UP_TO:
        return [(str(a2), Poss(j, Atom(subject, a2)))
                for a2 in _ordered_actions(system, spec.privacy_set)]
    if kind in (PropertyKind.MINIMALLY_ANONYMOUS, PropertyKind.MINIMALLY_PRIVATE):
        f = Poss(j, Not(Atom(subject, action)))
        return [(render(f), f)]
    if kind in (PropertyKind.MAXIMALLY_ONYMOUS, PropertyKind.MAXIMALLY_IDENTIFIED):
        f = Knows(j, Atom(subject, action))
        return [(render(f), f)]
    if kind is PropertyKind.ROLE_INTERCHANGEABLE:
        universe = (system.actions if spec.action_universe is None
                    else _ordered_actions(system, spec.action_universe))
        out = []
        for i2 in system.agents:
            if i2 == j:
                continue
            for a2 in universe:
                guard = Atom(i2, a2)
                swap = Poss(j, And(Atom(i2, action), Atom(subject, a2)))
                out.append((f"{i2}:{a2}", Implies(guard, swap)))
        return out
    raise ValidationError(f"unknown property kind {kind!r}")


def compile_property(system: InterpretedSystem, spec: PropertySpec) -> Formula:
    """The property as one formula: theta(subject, action) -> conjunction."""
    body = conj(f for _, f in _conjuncts(system, spec))
    return Implies(Atom(spec.subject, spec.action), body)


def check_property(system: InterpretedSystem, spec: PropertySpec) -> PropertyReport:
    """Check the property at every run.

    The report names the first failing run (declaration order) and, inside
    it, the first failing conjunct (agents before actions, declaration
    order).  ``holds`` always agrees with ``valid(system, witness_formula)``.
    """
    parts = _conjuncts(system, spec)
    witness = Implies(Atom(spec.subject, spec.action), conj(f for _, f in parts))
    ev = Evaluator(system)
    guard = Atom(spec.subject, spec.action)
    for run in system.runs:
        if not ev.evaluate(guard, run):
            continue
        for desc, f in parts:
            if not ev.evaluate(f, run):
                return PropertyReport(spec, False, witness, (run.run_id, desc))
    return PropertyReport(spec, True, witness, None)


# -- convenience constructors ------------------------------------------------


def anonymous_up_to(subject: str, action: Action, candidates, observer: str) -> PropertySpec:
    return PropertySpec(PropertyKind.ANONYMOUS_UP_TO, subject, action, observer,
                        anonymity_set=tuple(candidates))


def minimally_anonymous(subject: str, action: Action, observer: str) -> PropertySpec:
    return PropertySpec(PropertyKind.MINIMALLY_ANONYMOUS, subject, action, observer)


def private_up_to(subject: str, action: Action, candidates, observer: str) -> PropertySpec:
    return PropertySpec(PropertyKind.PRIVATE_UP_TO, subject, action, observer,
                        privacy_set=tuple(candidates))


def minimally_private(subject: str, action: Action, observer: str) -> PropertySpec:
    return PropertySpec(PropertyKind.MINIMALLY_PRIVATE, subject, action, observer)


def role_interchangeable(subject: str, action: Action, observer: str,
                         action_universe=None) -> PropertySpec:
    universe = None if action_universe is None else tuple(action_universe)
    return PropertySpec(PropertyKind.ROLE_INTERCHANGEABLE, subject, action, observer,
                        action_universe=universe)


def maximally_onymous(subject: str, action: Action, observer: str) -> PropertySpec:
    return PropertySpec(PropertyKind.MAXIMALLY_ONYMOUS, subject, action, observer)


def maximally_identified(subject: str, action: Action, observer: str) -> PropertySpec:
    return PropertySpec(PropertyKind.MAXIMALLY_IDENTIFIED, subject, action, observer)
