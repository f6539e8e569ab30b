"""Composing action stages and the conditions that make composition safe.

Sequential composition chains a registration-style stage (agents perform
``first_family`` actions whose parameters name intermediary agents) with a
second stage performed by those intermediaries.  The derived fact
theta(x, derived(c)) is defined by

    theta(x, derived(c))  iff  OR over k in first_params of
                               theta(x, first(k)) and theta(k, second(c))

Parallel composition conjoins two families over a shared parameter set:

    theta(x, derived(c))  iff  theta(x, family_a(c)) and theta(x, family_b(c))

Derivation adds facts and actions only; runs keep their identities and all
observer partitions are shared unchanged, so formulas over pre-existing
atoms keep their truth values.

Independence checks ask the observer's possibility operator to distribute
over conjunctions of stage facts; each variant compiles the corresponding
implication schema and checks it on every run.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations, combinations_with_replacement

from .formula import (And, Atom, Evaluator, Formula, Implies, Not, Poss,
                      conj, disj, render)
from .properties import PropertyReport
from .system import Action, InterpretedSystem, ValidationError, build_system


@dataclass(frozen=True)
class SequentialSchema:
    """Declares a two-stage chain inside one system.

    ``first_agents``: the population performing first-stage actions (I_R).
    ``first_params``: intermediary agents; each must be a declared agent and
    names both the parameter of a first-stage action and the performer of
    second-stage actions (I_P).
    ``second_params``: parameters of the second stage (C).
    ``derived_family`` must not collide with any declared action family.
    """

    first_family: str
    first_agents: tuple[str, ...]
    first_params: tuple[str, ...]
    second_family: str
    second_params: tuple[str, ...]
    derived_family: str

    @property
    def first_actions(self) -> tuple[Action, ...]:
        return tuple(Action(self.first_family, k) for k in self.first_params)

    @property
    def second_actions(self) -> tuple[Action, ...]:
        return tuple(Action(self.second_family, c) for c in self.second_params)

    @property
    def derived_actions(self) -> tuple[Action, ...]:
        return tuple(Action(self.derived_family, c) for c in self.second_params)


@dataclass(frozen=True)
class ParallelSchema:
    """Declares two action families performed jointly over shared parameters."""

    family_a: str
    family_b: str
    derived_family: str
    params: tuple[str, ...]

    @property
    def actions_a(self) -> tuple[Action, ...]:
        return tuple(Action(self.family_a, c) for c in self.params)

    @property
    def actions_b(self) -> tuple[Action, ...]:
        return tuple(Action(self.family_b, c) for c in self.params)

    @property
    def derived_actions(self) -> tuple[Action, ...]:
        return tuple(Action(self.derived_family, c) for c in self.params)


class IndependenceKind(Enum):
    BASIC = "basic"
    PAIRWISE = "pairwise"
    DISJUNCTIVE = "disjunctive"
    POS_NEG = "posneg"
    NEG_POS = "negpos"
    PARALLEL = "parallel"


class StructuralKind(Enum):
    EXCLUSIVE_ACTION = "exclusive-action"
    EXCLUSIVE_AGENT = "exclusive-agent"
    EXHAUSTIVE_POSTING = "exhaustive-posting"
    EXHAUSTIVE_REGISTRATION = "exhaustive-registration"
    BACKWARD_CAUSALITY = "backward-causality"
    FORWARD_CAUSALITY = "forward-causality"


@dataclass(frozen=True)
class StructuralCondition:
    """A fact-level (modality-free) side condition of a schema.

    ``action`` is required for EXCLUSIVE_ACTION (the action performed by at
    most one candidate performer per run); ``agent`` for EXCLUSIVE_AGENT
    (the agent performing at most one action of ``family`` per run, where
    ``family`` defaults to the schema's first stage).
    """

    kind: StructuralKind
    action: Action | None = None
    agent: str | None = None
    family: str | None = None


# ---------------------------------------------------------------------------
# Schema validation and derivation


def _validate_sequential(system: InterpretedSystem, schema: SequentialSchema,
                         require_fresh: bool = False) -> None:
    for i in schema.first_agents:
        if not system.has_agent(i):
            raise ValidationError(f"schema first-stage agent {i!r} is not declared")
    for k in schema.first_params:
        if not system.has_agent(k):
            raise ValidationError(
                f"schema intermediary {k!r} must be a declared agent "
                f"(it performs {schema.second_family} actions)")
        if not system.has_action(Action(schema.first_family, k)):
            raise ValidationError(f"undeclared action {Action(schema.first_family, k)}")
    for c in schema.second_params:
        if not system.has_action(Action(schema.second_family, c)):
            raise ValidationError(f"undeclared action {Action(schema.second_family, c)}")
    if require_fresh:
        for a in system.actions:
            if a.family == schema.derived_family:
                raise ValidationError(
                    f"derived family {schema.derived_family!r} already declared")


def _validate_parallel(system: InterpretedSystem, schema: ParallelSchema,
                       require_fresh: bool = False) -> None:
    for c in schema.params:
        for fam in (schema.family_a, schema.family_b):
            if not system.has_action(Action(fam, c)):
                raise ValidationError(f"undeclared action {Action(fam, c)}")
    if require_fresh:
        for a in system.actions:
            if a.family == schema.derived_family:
                raise ValidationError(
                    f"derived family {schema.derived_family!r} already declared")


def _rebuild(system: InterpretedSystem, new_actions, new_run_facts) -> InterpretedSystem:
    return build_system(
        name=system.name,
        agents=[(a, system.roles.get(a)) for a in system.agents],
        actions=list(system.actions) + list(new_actions),
        runs=[(r.run_id, sorted(new_run_facts[r.run_id],
                                key=lambda f: (f[0], f[1].family, f[1].param)))
              for r in system.runs],
        observers={obs: [list(b) for b in part.blocks]
                   for obs, part in system.observers.items()},
    )


def derive_sequential(system: InterpretedSystem, schema: SequentialSchema) -> InterpretedSystem:
    """Extend every run with the chained facts of ``schema.derived_family``.

    The defining disjunction ranges over the declared intermediaries; it is
    applied to every declared agent in performer position.
    """
    _validate_sequential(system, schema, require_fresh=True)
    run_facts = {}
    for run in system.runs:
        facts = set(run.facts)
        for k in schema.first_params:
            posted = [c for c in schema.second_params
                      if (k, Action(schema.second_family, c)) in run.facts]
            if not posted:
                continue
            first = Action(schema.first_family, k)
            for x in system.agents:
                if (x, first) in run.facts:
                    for c in posted:
                        facts.add((x, Action(schema.derived_family, c)))
        run_facts[run.run_id] = facts
    return _rebuild(system, schema.derived_actions, run_facts)


def derive_parallel(system: InterpretedSystem, schema: ParallelSchema) -> InterpretedSystem:
    """Extend every run with the conjoined facts of ``schema.derived_family``."""
    _validate_parallel(system, schema, require_fresh=True)
    run_facts = {}
    for run in system.runs:
        facts = set(run.facts)
        for x in system.agents:
            for c in schema.params:
                if ((x, Action(schema.family_a, c)) in run.facts
                        and (x, Action(schema.family_b, c)) in run.facts):
                    facts.add((x, Action(schema.derived_family, c)))
        run_facts[run.run_id] = facts
    return _rebuild(system, schema.derived_actions, run_facts)


# ---------------------------------------------------------------------------
# Independence


def parallel_subjects(system: InterpretedSystem, observer: str) -> tuple[str, ...]:
    """The agent population parallel-composition statements quantify over:
    agents tagged ``real`` when any are, else every non-observer agent."""
    tagged = system.agents_with_role("real")
    if tagged:
        return tagged
    return tuple(a for a in system.agents
                 if a != observer and system.roles.get(a) != "observer")


def independence_obligations(system: InterpretedSystem,
                             schema: SequentialSchema | ParallelSchema,
                             observer: str,
                             kind: IndependenceKind,
                             bound: int = 2):
    """Yield (label, formula) per instantiation, in canonical order.

    Canonical order enumerates agents and parameters in schema declaration
    order; paired variants enumerate unordered fact pairs (combinations with
    replacement) because conjunction order is immaterial.
    """
    j = observer
    if kind is IndependenceKind.PARALLEL:
        if not isinstance(schema, ParallelSchema):
            raise ValidationError("parallel independence needs a ParallelSchema")
        for i in parallel_subjects(system, j):
            for c in schema.params:
                a, b = Atom(i, Action(schema.family_a, c)), Atom(i, Action(schema.family_b, c))
                yield (f"{i},{c}",
                       Implies(And(Poss(j, a), Poss(j, b)), Poss(j, And(a, b))))
        return

    if not isinstance(schema, SequentialSchema):
        raise ValidationError(f"{kind.value} independence needs a SequentialSchema")
    uses = [(i, k) for i in schema.first_agents for k in schema.first_params]
    posts = [(k2, c) for k2 in schema.first_params for c in schema.second_params]

    def uatom(ik):
        return Atom(ik[0], Action(schema.first_family, ik[1]))

    def patom(kc):
        return Atom(kc[0], Action(schema.second_family, kc[1]))

    if kind is IndependenceKind.BASIC:
        for i, k in uses:
            for k2, c in posts:
                u, p = uatom((i, k)), patom((k2, c))
                yield (f"{i},{k},{k2},{c}",
                       Implies(And(Poss(j, u), Poss(j, p)), Poss(j, And(u, p))))
    elif kind is IndependenceKind.PAIRWISE:
        for upair in combinations_with_replacement(uses, 2):
            for ppair in combinations_with_replacement(posts, 2):
                us = And(uatom(upair[0]), uatom(upair[1]))
                ps = And(patom(ppair[0]), patom(ppair[1]))
                label = (f"{upair[0][0]},{upair[0][1]}+{upair[1][0]},{upair[1][1]};"
                         f"{ppair[0][0]},{ppair[0][1]}+{ppair[1][0]},{ppair[1][1]}")
                yield (label,
                       Implies(And(Poss(j, us), Poss(j, ps)), Poss(j, And(us, ps))))
    elif kind is IndependenceKind.DISJUNCTIVE:
        if bound < 1:
            raise ValidationError("disjunct bound must be at least 1")
        ulists = [l for n in range(1, bound + 1) for l in combinations(uses, n)]
        plists = [l for n in range(1, bound + 1) for l in combinations(posts, n)]
        for ul in ulists:
            for pl in plists:
                us = disj(uatom(x) for x in ul)
                ps = disj(patom(x) for x in pl)
                label = ("|".join(f"{i},{k}" for i, k in ul) + ";"
                         + "|".join(f"{k2},{c}" for k2, c in pl))
                yield (label,
                       Implies(And(Poss(j, us), Poss(j, ps)), Poss(j, And(us, ps))))
    elif kind is IndependenceKind.POS_NEG:
        for i, k in uses:
            for k2, c in posts:
                u, p = uatom((i, k)), Not(patom((k2, c)))
                yield (f"{i},{k},!{k2},{c}",
                       Implies(And(Poss(j, u), Poss(j, p)), Poss(j, And(u, p))))
    elif kind is IndependenceKind.NEG_POS:
        for i, k in uses:
            for k2, c in posts:
                u, p = Not(uatom((i, k))), patom((k2, c))
                yield (f"!{i},{k},{k2},{c}",
                       Implies(And(Poss(j, u), Poss(j, p)), Poss(j, And(u, p))))
    else:
        raise ValidationError(f"unknown independence kind {kind!r}")


def check_independence(system: InterpretedSystem,
                       observer: str,
                       schema: SequentialSchema | ParallelSchema,
                       kind: IndependenceKind = IndependenceKind.BASIC,
                       bound: int = 2) -> PropertyReport:
    """Check one independence variant; the counterexample names the first
    failing instantiation (canonical order) and the first failing run."""
    if isinstance(schema, SequentialSchema):
        _validate_sequential(system, schema)
    else:
        _validate_parallel(system, schema)
    if observer not in system.observers:
        raise ValidationError(f"{observer!r} has no declared partition")
    ev = Evaluator(system)
    parts = list(independence_obligations(system, schema, observer, kind, bound))
    witness = conj(f for _, f in parts)
    for label, f in parts:
        for run in system.runs:
            if not ev.evaluate(f, run):
                spec = f"independence[{kind.value}] for {observer}"
                return PropertyReport(spec, False, witness, (run.run_id, label))
    return PropertyReport(f"independence[{kind.value}] for {observer}", True, witness, None)


# ---------------------------------------------------------------------------
# Structural conditions


def structural_formula(system: InterpretedSystem,
                       schema: SequentialSchema,
                       cond: StructuralCondition) -> Formula:
    """Compile a structural condition to a modality-free formula."""
    kind = cond.kind
    if kind is StructuralKind.EXCLUSIVE_ACTION:
        if cond.action is None:
            raise ValidationError("exclusive-action needs an action")
        if not system.has_action(cond.action):
            raise ValidationError(f"undeclared action {cond.action}")
        if cond.action.family == schema.second_family:
            performers = schema.first_params
        elif cond.action.family == schema.first_family:
            performers = schema.first_agents
        else:
            performers = system.agents
        pairs = combinations(performers, 2)
        return conj(Not(And(Atom(x, cond.action), Atom(y, cond.action)))
                    for x, y in pairs)
    if kind is StructuralKind.EXCLUSIVE_AGENT:
        if cond.agent is None:
            raise ValidationError("exclusive-agent needs an agent")
        if not system.has_agent(cond.agent):
            raise ValidationError(f"undeclared agent {cond.agent!r}")
        family = cond.family or schema.first_family
        if family == schema.first_family:
            acts = schema.first_actions
        elif family == schema.second_family:
            acts = schema.second_actions
        else:
            acts = tuple(a for a in system.actions if a.family == family)
            if not acts:
                raise ValidationError(f"no declared actions in family {family!r}")
        return conj(Not(And(Atom(cond.agent, a), Atom(cond.agent, b)))
                    for a, b in combinations(acts, 2))
    if kind is StructuralKind.EXHAUSTIVE_POSTING:
        return conj(disj(Atom(k, Action(schema.second_family, c))
                         for k in schema.first_params)
                    for c in schema.second_params)
    if kind is StructuralKind.EXHAUSTIVE_REGISTRATION:
        return conj(disj(Atom(i, Action(schema.first_family, k))
                         for k in schema.first_params)
                    for i in schema.first_agents)
    if kind is StructuralKind.BACKWARD_CAUSALITY:
        return conj(Implies(Atom(k, Action(schema.second_family, c)),
                            disj(Atom(i, Action(schema.first_family, k))
                                 for i in schema.first_agents))
                    for k in schema.first_params
                    for c in schema.second_params)
    if kind is StructuralKind.FORWARD_CAUSALITY:
        return conj(Implies(Atom(i, Action(schema.first_family, k)),
                            disj(Atom(k, Action(schema.second_family, c))
                                 for c in schema.second_params))
                    for i in schema.first_agents
                    for k in schema.first_params)
    raise ValidationError(f"unknown structural kind {kind!r}")


def check_structural(system: InterpretedSystem,
                     schema: SequentialSchema,
                     cond: StructuralCondition) -> PropertyReport:
    _validate_sequential(system, schema)
    f = structural_formula(system, schema, cond)
    ev = Evaluator(system)
    name = cond.kind.value
    if cond.action is not None:
        name += f"[{cond.action}]"
    if cond.agent is not None:
        name += f"[{cond.agent}]"
    if cond.family is not None:
        name += f"[{cond.family}]"
    for run in system.runs:
        if not ev.evaluate(f, run):
            return PropertyReport(name, False, f, (run.run_id, render(f)))
    return PropertyReport(name, True, f, None)
