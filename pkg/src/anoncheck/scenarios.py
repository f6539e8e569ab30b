"""Executable claim registry, example systems, and falsification search.

Every registered claim has machine-checkable hypotheses and conclusion; a
claim on a system is *confirmed* (hypotheses and conclusion hold), *vacuous*
(some hypothesis fails), or *REFUTED* (hypotheses hold, conclusion fails).
The registered claims are theorems of the underlying semantics, so REFUTED
must never occur with full hypotheses; the sweep and falsify entry points
exist to hammer on exactly that, and to demonstrate hypothesis necessity by
re-running searches with a hypothesis dropped.

Hypotheses and conclusions are compiled once per declaration shape into
shared formula objects and evaluated through the standard evaluator; all
semantics lives in the formula/property/composition modules.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from itertools import combinations, permutations

from .composition import (IndependenceKind, ParallelSchema, SequentialSchema,
                          StructuralCondition, StructuralKind, derive_parallel,
                          derive_sequential, independence_obligations,
                          parallel_subjects, structural_formula)
from .formula import And, Atom, Evaluator, Formula, Implies, Poss, conj
from .properties import (PropertySpec, anonymous_up_to, compile_property,
                         maximally_identified, maximally_onymous,
                         minimally_anonymous, minimally_private,
                         private_up_to, role_interchangeable)
from .system import Action, InterpretedSystem, ValidationError, build_system

ClaimId = str


class ScenarioError(ValidationError):
    """Raised when a bundled-scenario invariant breaks (search failure,
    attributed property not reproduced)."""


# ---------------------------------------------------------------------------
# Schemas and schema inference


def standard_sequential_schema(system: InterpretedSystem,
                               first_family: str = "use",
                               second_family: str = "post",
                               derived_family: str = "submit") -> SequentialSchema:
    """Infer the two-stage schema from a system's declaration.

    The first-stage population is the agents tagged ``real`` (falling back
    to the performers of first-family actions); intermediaries are the
    parameters of the first-family actions; second-stage parameters come
    from the second-family actions.
    """
    first_params = tuple(a.param for a in system.actions if a.family == first_family)
    second_params = tuple(a.param for a in system.actions if a.family == second_family)
    if not first_params or not second_params:
        raise ValidationError(
            f"cannot infer schema: no {first_family}/{second_family} actions declared")
    first_agents = system.agents_with_role("real")
    if not first_agents:
        performers = set()
        for run in system.runs:
            for agent, action in run.facts:
                if action.family == first_family:
                    performers.add(agent)
        first_agents = tuple(a for a in system.agents if a in performers)
    if not first_agents:
        raise ValidationError("cannot infer schema: no first-stage agents")
    return SequentialSchema(first_family, first_agents, first_params,
                            second_family, second_params, derived_family)


def standard_parallel_schema(system: InterpretedSystem,
                             family_a: str = "act_a",
                             family_b: str = "act_b",
                             derived_family: str = "joint") -> ParallelSchema:
    params = tuple(a.param for a in system.actions if a.family == family_a)
    params_b = tuple(a.param for a in system.actions if a.family == family_b)
    if not params or set(params) != set(params_b):
        raise ValidationError(
            f"cannot infer schema: {family_a}/{family_b} parameter sets differ")
    return ParallelSchema(family_a, family_b, derived_family, params)


# ---------------------------------------------------------------------------
# Checkers: named obligation bundles shared by claims


@dataclass(frozen=True)
class _Obligation:
    label: str
    formula: Formula


class ClaimContext:
    """One system under scrutiny, with lazily derived composition."""

    __slots__ = ("base", "schema", "flavor", "_derived", "_ev_base", "_ev_derived")

    def __init__(self, base: InterpretedSystem, schema, flavor: str,
                 derived: InterpretedSystem | None = None):
        self.base = base
        self.schema = schema
        self.flavor = flavor
        self._derived = derived
        self._ev_base = None
        self._ev_derived = None

    @property
    def derived(self) -> InterpretedSystem:
        if self._derived is None:
            if self.flavor == "parallel":
                self._derived = derive_parallel(self.base, self.schema)
            else:
                self._derived = derive_sequential(self.base, self.schema)
        return self._derived

    def evaluator(self, target: str) -> Evaluator:
        if target == "base":
            if self._ev_base is None:
                self._ev_base = Evaluator(self.base)
            return self._ev_base
        if self._ev_derived is None:
            self._ev_derived = Evaluator(self.derived)
        return self._ev_derived


class _AllValid:
    """Holds iff every obligation formula is valid on the target system."""

    __slots__ = ("name", "target", "obligations")

    def __init__(self, name: str, target: str, obligations):
        self.name = name
        self.target = target
        self.obligations = tuple(obligations)

    def holds(self, ctx: ClaimContext) -> bool:
        ev = ctx.evaluator(self.target)
        runs = ev.system.runs
        for ob in self.obligations:
            f = ob.formula
            for run in runs:
                if not ev.evaluate(f, run):
                    return False
        return True

    def first_failure(self, ctx: ClaimContext) -> str | None:
        ev = ctx.evaluator(self.target)
        for ob in self.obligations:
            for run in ev.system.runs:
                if not ev.evaluate(ob.formula, run):
                    return f"{ob.label} @ {run.run_id}"
        return None


class _AnyOfEachValid:
    """For each item, at least one alternative must be valid (CB-style
    either/or hypotheses).  Symmetric in the alternatives."""

    __slots__ = ("name", "target", "items")

    def __init__(self, name: str, target: str, items):
        self.name = name
        self.target = target
        self.items = tuple(items)  # (label, (formula, ...))

    def _valid(self, ev, f) -> bool:
        return all(ev.evaluate(f, run) for run in ev.system.runs)

    def holds(self, ctx: ClaimContext) -> bool:
        ev = ctx.evaluator(self.target)
        return all(any(self._valid(ev, f) for f in fs) for _, fs in self.items)

    def first_failure(self, ctx: ClaimContext) -> str | None:
        ev = ctx.evaluator(self.target)
        for label, fs in self.items:
            if not any(self._valid(ev, f) for f in fs):
                return f"{label} (no alternative holds)"
        return None


class _EquivalenceValid:
    """Two obligation bundles must agree: both all-valid or neither."""

    __slots__ = ("name", "target", "left", "right", "left_label", "right_label")

    def __init__(self, name: str, target: str, left, right,
                 left_label: str, right_label: str):
        self.name = name
        self.target = target
        self.left = tuple(left)
        self.right = tuple(right)
        self.left_label = left_label
        self.right_label = right_label

    def _all_valid(self, ev, obligations) -> bool:
        for ob in obligations:
            for run in ev.system.runs:
                if not ev.evaluate(ob.formula, run):
                    return False
        return True

    def holds(self, ctx: ClaimContext) -> bool:
        ev = ctx.evaluator(self.target)
        return self._all_valid(ev, self.left) == self._all_valid(ev, self.right)

    def first_failure(self, ctx: ClaimContext) -> str | None:
        ev = ctx.evaluator(self.target)
        lv, rv = self._all_valid(ev, self.left), self._all_valid(ev, self.right)
        if lv == rv:
            return None
        return (f"{self.left_label}={'holds' if lv else 'fails'} but "
                f"{self.right_label}={'holds' if rv else 'fails'}")


class CheckSuite:
    """Compiles the named checkers for one declaration shape.

    A suite is reusable across every system sharing the declaration (the
    sweep generates thousands of such systems); compiled formulas are shared
    so the evaluator's per-block memo pays off.
    """

    def __init__(self, flavor: str, schema, observer: str,
                 ref_base: InterpretedSystem, bound: int = 2):
        self.flavor = flavor
        self.schema = schema
        self.observer = observer
        self.ref_base = ref_base
        self.bound = bound
        self._ref_derived: InterpretedSystem | None = None
        self._checkers: dict[str, object] = {}

    @property
    def ref_derived(self) -> InterpretedSystem:
        if self._ref_derived is None:
            if self.flavor == "parallel":
                self._ref_derived = derive_parallel(self.ref_base, self.schema)
            else:
                self._ref_derived = derive_sequential(self.ref_base, self.schema)
        return self._ref_derived

    def context(self, system: InterpretedSystem) -> ClaimContext:
        derived = self.ref_derived if system is self.ref_base else None
        return ClaimContext(system, self.schema, self.flavor, derived)

    def checker(self, name: str):
        c = self._checkers.get(name)
        if c is None:
            c = self._build(name)
            self._checkers[name] = c
        return c

    # -- builders ---------------------------------------------------------

    def _props(self, ref: InterpretedSystem, target: str, name: str, specs):
        obligations = []
        for spec in specs:
            label = f"{spec.kind.value}({spec.subject}, {spec.action})"
            obligations.append(_Obligation(label, compile_property(ref, spec)))
        return _AllValid(name, target, obligations)

    def _independence(self, name: str, kind: IndependenceKind):
        obs = [_Obligation(label, f) for label, f in independence_obligations(
            self.ref_base, self.schema, self.observer, kind, self.bound)]
        return _AllValid(name, "base", obs)

    def _structural(self, name: str, conds):
        obs = []
        for cond in conds:
            label = cond.kind.value
            if cond.action is not None:
                label += f"[{cond.action}]"
            if cond.agent is not None:
                label += f"[{cond.agent}]"
            obs.append(_Obligation(label, structural_formula(self.ref_base, self.schema, cond)))
        return _AllValid(name, "base", obs)

    def _build(self, name: str):
        j = self.observer
        if self.flavor == "sequential":
            sch: SequentialSchema = self.schema
            I_R, I_P, C = sch.first_agents, sch.first_params, sch.second_params
            A_U, A_P = sch.first_actions, sch.second_actions
            A_S = sch.derived_actions
            use, post, sub = sch.first_family, sch.second_family, sch.derived_family
            if name == "independence":
                return self._independence(name, IndependenceKind.BASIC)
            if name == "pairwise-independence":
                return self._independence(name, IndependenceKind.PAIRWISE)
            if name == "disjunctive-independence":
                return self._independence(name, IndependenceKind.DISJUNCTIVE)
            if name == "posneg-independence":
                return self._independence(name, IndependenceKind.POS_NEG)
            if name == "negpos-independence":
                return self._independence(name, IndependenceKind.NEG_POS)
            if name == "use-anonymity":
                return self._props(self.ref_base, "base", name,
                                   [anonymous_up_to(i, Action(use, k), I_R, j)
                                    for i in I_R for k in I_P])
            if name == "use-onymity":
                return self._props(self.ref_base, "base", name,
                                   [maximally_onymous(i, Action(use, k), j)
                                    for i in I_R for k in I_P])
            if name == "use-min-anonymity":
                return self._props(self.ref_base, "base", name,
                                   [minimally_anonymous(i, Action(use, k), j)
                                    for i in I_R for k in I_P])
            if name == "use-role-interchangeability":
                return self._props(self.ref_base, "base", name,
                                   [role_interchangeable(i, Action(use, k), j, A_U)
                                    for i in I_R for k in I_P])
            if name == "post-privacy":
                return self._props(self.ref_base, "base", name,
                                   [private_up_to(k, Action(post, c), A_P, j)
                                    for k in I_P for c in C])
            if name == "post-identity":
                return self._props(self.ref_base, "base", name,
                                   [maximally_identified(k, Action(post, c), j)
                                    for k in I_P for c in C])
            if name == "post-min-privacy":
                return self._props(self.ref_base, "base", name,
                                   [minimally_private(k, Action(post, c), j)
                                    for k in I_P for c in C])
            if name == "post-role-interchangeability":
                return self._props(self.ref_base, "base", name,
                                   [role_interchangeable(k, Action(post, c), j, A_P)
                                    for k in I_P for c in C])
            if name == "exhaustive-posting":
                return self._structural(name, [StructuralCondition(StructuralKind.EXHAUSTIVE_POSTING)])
            if name == "exhaustive-registration":
                return self._structural(name, [StructuralCondition(StructuralKind.EXHAUSTIVE_REGISTRATION)])
            if name == "backward-causality":
                return self._structural(name, [StructuralCondition(StructuralKind.BACKWARD_CAUSALITY)])
            if name == "exclusive-posts":
                return self._structural(name, [
                    StructuralCondition(StructuralKind.EXCLUSIVE_ACTION, action=Action(post, c))
                    for c in C])
            if name == "exclusive-agents":
                return self._structural(name, [
                    StructuralCondition(StructuralKind.EXCLUSIVE_AGENT, agent=i)
                    for i in I_R])
            if name == "submit-privacy":
                return self._props(self.ref_derived, "derived", name,
                                   [private_up_to(i, Action(sub, c), A_S, j)
                                    for i in I_R for c in C])
            if name == "submit-anonymity":
                return self._props(self.ref_derived, "derived", name,
                                   [anonymous_up_to(i, Action(sub, c), I_R, j)
                                    for i in I_R for c in C])
            if name in ("submit-min-privacy", "submit-min-anonymity"):
                return self._props(self.ref_derived, "derived", name,
                                   [minimally_private(i, Action(sub, c), j)
                                    for i in I_R for c in C])
            if name == "submit-onymity":
                return self._props(self.ref_derived, "derived", name,
                                   [maximally_onymous(i, Action(sub, c), j)
                                    for i in I_R for c in C])
            if name == "submit-role-interchangeability":
                return self._props(self.ref_derived, "derived", name,
                                   [role_interchangeable(i, Action(sub, c), j, A_S)
                                    for i in I_R for c in C])
            if name == "independence-reformulation-equivalence":
                left = [_Obligation(label, f) for label, f in independence_obligations(
                    self.ref_base, sch, j, IndependenceKind.BASIC)]
                right = []
                for i2 in I_R:
                    for k2 in I_P:
                        for c in C:
                            guard = And(Atom(i2, Action(use, k2)), Atom(k2, Action(post, c)))
                            body = conj(
                                Implies(Poss(j, Atom(i, Action(use, k))),
                                        Poss(j, And(Atom(i, Action(use, k)),
                                                    Atom(k2, Action(post, c)))))
                                for i in I_R for k in I_P)
                            right.append(_Obligation(f"{i2},{k2},{c}", Implies(guard, body)))
                return _EquivalenceValid(name, "base", left, right,
                                         "independence", "reformulation")
        else:
            sch: ParallelSchema = self.schema
            subjects = parallel_subjects(self.ref_base, j)
            A_a, A_b = sch.actions_a, sch.actions_b
            A_J = sch.derived_actions
            fa, fb, fj = sch.family_a, sch.family_b, sch.derived_family
            if name == "independence":
                return self._independence(name, IndependenceKind.PARALLEL)
            if name == "a-privacy":
                return self._props(self.ref_base, "base", name,
                                   [private_up_to(i, Action(fa, c), A_a, j)
                                    for i in subjects for c in sch.params])
            if name == "b-privacy":
                return self._props(self.ref_base, "base", name,
                                   [private_up_to(i, Action(fb, c), A_b, j)
                                    for i in subjects for c in sch.params])
            if name == "a-anonymity":
                return self._props(self.ref_base, "base", name,
                                   [anonymous_up_to(i, Action(fa, c), subjects, j)
                                    for i in subjects for c in sch.params])
            if name == "b-anonymity":
                return self._props(self.ref_base, "base", name,
                                   [anonymous_up_to(i, Action(fb, c), subjects, j)
                                    for i in subjects for c in sch.params])
            if name == "min-privacy-either":
                items = []
                for i in subjects:
                    for c in sch.params:
                        alts = (compile_property(self.ref_base, minimally_private(i, Action(fa, c), j)),
                                compile_property(self.ref_base, minimally_private(i, Action(fb, c), j)))
                        items.append((f"{i},{c}", alts))
                return _AnyOfEachValid(name, "base", items)
            if name == "ab-identity":
                specs = []
                for i in subjects:
                    for c in sch.params:
                        specs.append(maximally_identified(i, Action(fa, c), j))
                        specs.append(maximally_identified(i, Action(fb, c), j))
                return self._props(self.ref_base, "base", name, specs)
            if name == "joint-privacy":
                return self._props(self.ref_derived, "derived", name,
                                   [private_up_to(i, Action(fj, c), A_J, j)
                                    for i in subjects for c in sch.params])
            if name == "joint-anonymity":
                return self._props(self.ref_derived, "derived", name,
                                   [anonymous_up_to(i, Action(fj, c), subjects, j)
                                    for i in subjects for c in sch.params])
            if name == "joint-min-privacy":
                return self._props(self.ref_derived, "derived", name,
                                   [minimally_private(i, Action(fj, c), j)
                                    for i in subjects for c in sch.params])
            if name == "joint-identity":
                return self._props(self.ref_derived, "derived", name,
                                   [maximally_identified(i, Action(fj, c), j)
                                    for i in subjects for c in sch.params])
        raise ValidationError(f"unknown checker {name!r}")


# ---------------------------------------------------------------------------
# Claim registry


@dataclass(frozen=True)
class ClaimDef:
    claim_id: ClaimId
    flavor: str  # "sequential" | "parallel"
    summary: str
    hypotheses: tuple[str, ...]
    conclusion: str
    witness_only: bool = False  # existence claims checked against one system


CLAIMS: dict[ClaimId, ClaimDef] = {}


def _register(*args, **kwargs):
    cdef = ClaimDef(*args, **kwargs)
    CLAIMS[cdef.claim_id] = cdef


_register("C3.1", "sequential",
          "witness: stage properties hold while chained facts lose both "
          "anonymity and privacy",
          ("use-anonymity", "post-privacy"), "submit-exposure", witness_only=True)
_register("L3.1", "sequential",
          "first-stage facts all maximally onymous give stage independence",
          ("use-onymity",), "independence")
_register("L3.2", "sequential",
          "second-stage facts all maximally identified give stage independence",
          ("post-identity",), "independence")
_register("C3.2", "sequential",
          "independence and second-stage privacy lift to chained privacy",
          ("independence", "post-privacy"), "submit-privacy")
_register("C3.3", "sequential",
          "independence and first-stage anonymity lift to chained anonymity",
          ("independence", "use-anonymity"), "submit-anonymity")
_register("C3.4", "sequential",
          "onymous first stage and private second stage give chained privacy",
          ("use-onymity", "post-privacy"), "submit-privacy")
_register("C3.5", "sequential",
          "anonymous first stage and identified second stage give chained anonymity",
          ("use-anonymity", "post-identity"), "submit-anonymity")
_register("C4.1", "parallel",
          "independent components each private give joint privacy",
          ("independence", "a-privacy", "b-privacy"), "joint-privacy")
_register("C4.2", "parallel",
          "independent components each anonymous give joint anonymity",
          ("independence", "a-anonymity", "b-anonymity"), "joint-anonymity")
_register("CA.1", "sequential",
          "pairwise independence and second-stage role interchangeability "
          "lift to chained role interchangeability",
          ("pairwise-independence", "post-role-interchangeability"),
          "submit-role-interchangeability")
_register("CA.2", "sequential",
          "pairwise independence and first-stage role interchangeability "
          "lift to chained role interchangeability",
          ("pairwise-independence", "use-role-interchangeability"),
          "submit-role-interchangeability")
_register("CA.3", "sequential",
          "independence, exhaustive exclusive posting, exclusive agents and "
          "minimally private second stage give minimally private chains",
          ("independence", "exhaustive-posting", "exclusive-posts",
           "exclusive-agents", "post-min-privacy"), "submit-min-privacy")
_register("CA.4", "sequential",
          "independence, exhaustive registration, exclusivity and minimally "
          "anonymous first stage give minimally anonymous chains",
          ("independence", "exhaustive-registration", "exclusive-agents",
           "exclusive-posts", "use-min-anonymity"), "submit-min-anonymity")
_register("CA.5", "sequential",
          "onymous first stage instead of assumed independence still gives "
          "minimally private chains",
          ("exhaustive-posting", "exclusive-posts", "exclusive-agents",
           "use-onymity", "post-min-privacy"), "submit-min-privacy")
_register("CA.6", "sequential",
          "identified second stage instead of assumed independence still "
          "gives minimally anonymous chains",
          ("exhaustive-registration", "exclusive-posts", "exclusive-agents",
           "use-min-anonymity", "post-identity"), "submit-min-anonymity")
_register("CA.7", "sequential",
          "onymous first stage and identified second stage give maximally "
          "onymous chains",
          ("use-onymity", "post-identity"), "submit-onymity")
_register("CB.1", "parallel",
          "either component minimally private gives minimally private joints",
          ("min-privacy-either",), "joint-min-privacy")
_register("CB.2", "parallel",
          "both components maximally identified give maximally identified joints",
          ("ab-identity",), "joint-identity")
_register("LA.1", "sequential",
          "independence extends to bounded disjunctions of stage facts",
          ("independence",), "disjunctive-independence")
_register("LA.2", "sequential",
          "independence with exhaustive exclusive posting extends to negated "
          "second-stage facts",
          ("independence", "exhaustive-posting", "exclusive-posts"),
          "posneg-independence")
_register("LA.3", "sequential",
          "independence with exhaustive registration and exclusive agents "
          "extends to negated first-stage facts",
          ("independence", "exhaustive-registration", "exclusive-agents"),
          "negpos-independence")
_register("APPC-EQ", "sequential",
          "under backward causality, independence coincides with its "
          "guarded reformulation",
          ("backward-causality",), "independence-reformulation-equivalence")


#: Hypothesis-strengthening relations: every system satisfying the left
#: claim's hypotheses must satisfy the right claim's.
HYPOTHESIS_IMPLICATIONS: tuple[tuple[ClaimId, ClaimId], ...] = (
    ("C3.4", "C3.2"), ("C3.5", "C3.3"), ("CA.5", "CA.3"), ("CA.6", "CA.4"),
)


class ClaimVerdict(Enum):
    CONFIRMED = "confirmed"
    VACUOUS = "vacuous"
    REFUTED = "REFUTED"


@dataclass(frozen=True)
class HypothesisOutcome:
    name: str
    holds: bool
    detail: str | None = None


@dataclass(frozen=True)
class ClaimReport:
    claim_id: ClaimId
    system_name: str
    hypotheses: tuple[HypothesisOutcome, ...]
    hypotheses_hold: bool
    conclusion: HypothesisOutcome
    conclusion_holds: bool
    verdict: ClaimVerdict
    dropped: tuple[str, ...] = ()
    #: C3.1 only: per-item breakdown (index, description, holds, detail).
    items: tuple[tuple[int, str, bool, str | None], ...] = ()


def _suite_for_system(cdef: ClaimDef, system: InterpretedSystem,
                      observer: str | None, schema, bound: int) -> tuple[CheckSuite, str]:
    if observer is None:
        if not system.observers:
            raise ValidationError("system declares no observer")
        observer = next(iter(system.observers))
    if schema is None:
        if cdef.flavor == "parallel":
            schema = standard_parallel_schema(system)
        else:
            schema = standard_sequential_schema(system)
    return CheckSuite(cdef.flavor, schema, observer, system, bound), observer


def _check_witness_claim(suite: CheckSuite, ctx: ClaimContext,
                         system: InterpretedSystem) -> ClaimReport:
    """C3.1: the given system should witness all four items."""
    anon = suite.checker("use-anonymity")
    priv = suite.checker("post-privacy")
    sub_anon = suite.checker("submit-anonymity")
    sub_priv = suite.checker("submit-privacy")
    i1 = anon.holds(ctx)
    i2 = priv.holds(ctx)
    f3 = sub_anon.first_failure(ctx)
    f4 = sub_priv.first_failure(ctx)
    items = (
        (1, "every first-stage fact anonymous up to the first-stage population",
         i1, None if i1 else anon.first_failure(ctx)),
        (2, "every second-stage fact private up to the second-stage actions",
         i2, None if i2 else priv.first_failure(ctx)),
        (3, "some chained fact not anonymous", f3 is not None, f3),
        (4, "some chained fact not private", f4 is not None, f4),
    )
    all_hold = all(h for _, _, h, _ in items)
    verdict = ClaimVerdict.CONFIRMED if all_hold else ClaimVerdict.VACUOUS
    return ClaimReport(
        claim_id="C3.1", system_name=system.name,
        hypotheses=(HypothesisOutcome("use-anonymity", i1),
                    HypothesisOutcome("post-privacy", i2)),
        hypotheses_hold=i1 and i2,
        conclusion=HypothesisOutcome("submit-exposure", f3 is not None and f4 is not None),
        conclusion_holds=f3 is not None and f4 is not None,
        verdict=verdict, items=items)


def check_claim(claim_id: ClaimId, system: InterpretedSystem, *,
                observer: str | None = None, schema=None,
                drop=(), bound: int = 2) -> ClaimReport:
    """Evaluate one registered claim on one system.

    ``drop`` removes hypotheses by name before the verdict is computed,
    which is how hypothesis necessity is probed.  Witness-only claims
    (C3.1) report CONFIRMED when the system exhibits all items and VACUOUS
    otherwise; existence statements cannot be refuted by a single system.
    """
    try:
        cdef = CLAIMS[claim_id]
    except KeyError:
        raise ValidationError(f"unknown claim {claim_id!r}") from None
    dropped = tuple(drop)
    for name in dropped:
        if name not in cdef.hypotheses:
            raise ValidationError(f"claim {claim_id} has no hypothesis {name!r}")
    suite, observer = _suite_for_system(cdef, system, observer, schema, bound)
    ctx = suite.context(system)
    if cdef.witness_only:
        return _check_witness_claim(suite, ctx, system)

    outcomes = []
    hyps_hold = True
    for name in cdef.hypotheses:
        if name in dropped:
            continue
        checker = suite.checker(name)
        ok = checker.holds(ctx)
        outcomes.append(HypothesisOutcome(name, ok, None if ok else checker.first_failure(ctx)))
        hyps_hold = hyps_hold and ok
    conc = suite.checker(cdef.conclusion)
    conc_ok = conc.holds(ctx)
    conclusion = HypothesisOutcome(cdef.conclusion, conc_ok,
                                   None if conc_ok else conc.first_failure(ctx))
    if not hyps_hold:
        verdict = ClaimVerdict.VACUOUS
    elif conc_ok:
        verdict = ClaimVerdict.CONFIRMED
    else:
        verdict = ClaimVerdict.REFUTED
    return ClaimReport(claim_id, system.name, tuple(outcomes), hyps_hold,
                       conclusion, conc_ok, verdict, dropped)


# ---------------------------------------------------------------------------
# Example systems


_STANDARD_AGENTS = (("i1", "real"), ("i2", "real"),
                    ("k1", "pseudo"), ("k2", "pseudo"), ("j", "observer"))
_STANDARD_ACTIONS = ("use(k1)", "use(k2)", "post(c1)", "post(c2)")

_R_FACTS = {
    "r1": (("i1", "use(k1)"), ("k1", "post(c1)"), ("i2", "use(k2)"), ("k2", "post(c2)")),
    "r2": (("i1", "use(k2)"), ("k2", "post(c1)"), ("i2", "use(k1)"), ("k1", "post(c2)")),
    "r3": (("i1", "use(k1)"), ("k1", "post(c2)"), ("i2", "use(k2)"), ("k2", "post(c1)")),
    "r4": (("i1", "use(k2)"), ("k2", "post(c2)"), ("i2", "use(k1)"), ("k1", "post(c1)")),
    "r5": (("i1", "use(k1)"), ("i1", "use(k2)"), ("k1", "post(c1)"), ("k2", "post(c2)")),
    "r6": (("i1", "use(k1)"), ("i1", "use(k2)"), ("k1", "post(c2)"), ("k2", "post(c1)")),
}


def _standard_system(name: str, run_ids, extra_runs=()) -> InterpretedSystem:
    runs = [(rid, _R_FACTS[rid]) for rid in run_ids]
    runs += list(extra_runs)
    return build_system(
        name=name, agents=_STANDARD_AGENTS, actions=_STANDARD_ACTIONS,
        runs=runs, observers={"j": [[rid for rid, _ in runs]]})


# Bit layout for the completion search: use fact (i_idx, k_idx) is bit
# i_idx*2 + k_idx of U; post fact (k_idx, c_idx) is bit k_idx*2 + c_idx of P.
_GRID_SWAPS = ((0b1001, 0b0110), (0b0110, 0b1001))


def _mask_of(facts, kind: str) -> int:
    mask = 0
    for agent, action in facts:
        act = Action.parse(action)
        if kind == "use" and act.family == "use":
            mask |= 1 << ((int(agent[1]) - 1) * 2 + (int(act.param[1]) - 1))
        if kind == "post" and act.family == "post":
            mask |= 1 << ((int(agent[1]) - 1) * 2 + (int(act.param[1]) - 1))
    return mask


def _swap_closed(masks) -> bool:
    for m in masks:
        for pair, need in _GRID_SWAPS:
            if m & pair == pair and not any(x & need == need for x in masks):
                return False
    return True


def _submit_mask(u: int, p: int) -> int:
    s = 0
    for i in (0, 1):
        for c in (0, 1):
            for k in (0, 1):
                if u >> (i * 2 + k) & 1 and p >> (k * 2 + c) & 1:
                    s |= 1 << (i * 2 + c)
                    break
    return s


def _cover_mask(u: int, p: int) -> int:
    m = 0
    for ub in range(4):
        if u >> ub & 1:
            for pb in range(4):
                if p >> pb & 1:
                    m |= 1 << (ub * 4 + pb)
    return m


def _present_submasks(masks) -> set[int]:
    """All 1- and 2-bit submasks occurring inside the given 4-bit masks."""
    out: set[int] = set()
    for m in masks:
        bits = [b for b in range(4) if m >> b & 1]
        for b in bits:
            out.add(1 << b)
        for x, y in combinations(bits, 2):
            out.add((1 << x) | (1 << y))
    return out


def _pairwise_fails(runs) -> bool:
    """True when some pair of co-possible stage-fact pairs is never joint."""
    u_present = _present_submasks([u for u, _ in runs])
    p_present = _present_submasks([p for _, p in runs])
    for mu in u_present:
        for mp in p_present:
            if not any(u & mu == mu and p & mp == mp for u, p in runs):
                return True
    return False


def _completion_ok(runs) -> bool:
    covered = 0
    for u, p in runs:
        covered |= _cover_mask(u, p)
    if covered != 0xFFFF:
        return False
    if not _swap_closed([u for u, _ in runs]):
        return False
    if not _swap_closed([p for _, p in runs]):
        return False
    if not _pairwise_fails(runs):
        return False
    # The attributed failure of chained role interchangeability.
    return not _swap_closed([_submit_mask(u, p) for u, p in runs])


def _search_completion(fixed, slots: int):
    """Lexicographically first completion (by run encoding) satisfying all
    attributed constraints; exhaustive over the 256 candidate runs."""
    fixed = list(fixed)
    taken = set(fixed)
    candidates = [(u, p) for enc in range(256)
                  for u, p in [(enc >> 4, enc & 0xF)] if (u, p) not in taken]
    base_cov = 0
    for u, p in fixed:
        base_cov |= _cover_mask(u, p)
    cov = [_cover_mask(u, p) for u, p in candidates]
    n = len(candidates)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | cov[i]

    chosen: list[int] = []

    def dfs(start: int, covered: int):
        remaining = slots - len(chosen)
        if remaining == 0:
            runs = fixed + [candidates[i] for i in chosen]
            return runs if covered == 0xFFFF and _completion_ok(runs) else None
        if covered | suffix[start] != 0xFFFF:
            return None
        for i in range(start, n - remaining + 1):
            chosen.append(i)
            result = dfs(i + 1, covered | cov[i])
            if result is not None:
                return result
            chosen.pop()
        return None

    result = dfs(0, base_cov)
    if result is None:
        raise ScenarioError("completion search exhausted without a solution")
    return result[len(fixed):]


def _masks_to_facts(u: int, p: int):
    facts = []
    for i in (0, 1):
        for k in (0, 1):
            if u >> (i * 2 + k) & 1:
                facts.append((f"i{i + 1}", f"use(k{k + 1})"))
    for k in (0, 1):
        for c in (0, 1):
            if p >> (k * 2 + c) & 1:
                facts.append((f"k{k + 1}", f"post(c{c + 1})"))
    return tuple(facts)


def _verify_reconstruction(system: InterpretedSystem) -> None:
    """Re-check the searched system through the real checkers."""
    from .composition import check_independence
    schema = standard_sequential_schema(system)
    basic = check_independence(system, "j", schema, IndependenceKind.BASIC)
    pairwise = check_independence(system, "j", schema, IndependenceKind.PAIRWISE)
    if not basic.holds or pairwise.holds:
        raise ScenarioError(f"reconstructed {system.name} lost its independence profile")
    suite = CheckSuite("sequential", schema, "j", system)
    ctx = suite.context(system)
    if not suite.checker("post-role-interchangeability").holds(ctx):
        raise ScenarioError(f"reconstructed {system.name}: post stage not interchangeable")
    if not suite.checker("use-role-interchangeability").holds(ctx):
        raise ScenarioError(f"reconstructed {system.name}: use stage not interchangeable")
    if suite.checker("submit-role-interchangeability").holds(ctx):
        raise ScenarioError(f"reconstructed {system.name}: chained stage unexpectedly interchangeable")


@lru_cache(maxsize=None)
def paper_system(name: str) -> InterpretedSystem:
    """Bundled example systems, including the two search-reconstructed ones.

    ``s125678`` completes r1, r2, r5, r6 with two searched runs (r7, r8);
    ``s129-12`` completes r1, r2 with four searched runs (r9 to r12).  The
    searches are deterministic and their results are re-verified against
    the attributed properties at construction time.
    """
    if name == "s12":
        return _standard_system("s12", ("r1", "r2"))
    if name == "s1234":
        return _standard_system("s1234", ("r1", "r2", "r3", "r4"))
    if name == "s56":
        return _standard_system("s56", ("r5", "r6"))
    if name == "s125678":
        fixed = [(_mask_of(_R_FACTS[r], "use"), _mask_of(_R_FACTS[r], "post"))
                 for r in ("r1", "r2", "r5", "r6")]
        found = _search_completion(fixed, 2)
        extra = [(f"r{7 + i}", _masks_to_facts(u, p)) for i, (u, p) in enumerate(found)]
        system = _standard_system("s125678", ("r1", "r2", "r5", "r6"), extra)
        _verify_reconstruction(system)
        return system
    if name == "s129-12":
        fixed = [(_mask_of(_R_FACTS[r], "use"), _mask_of(_R_FACTS[r], "post"))
                 for r in ("r1", "r2")]
        found = _search_completion(fixed, 4)
        extra = [(f"r{9 + i}", _masks_to_facts(u, p)) for i, (u, p) in enumerate(found)]
        system = _standard_system("s129-12", ("r1", "r2"), extra)
        _verify_reconstruction(system)
        return system
    raise ValidationError(f"unknown example system {name!r}")


PAPER_SYSTEM_NAMES = ("s12", "s1234", "s56", "s125678", "s129-12")


def fixture_system(name: str) -> InterpretedSystem:
    """Additional bundled systems used as claim-demo defaults."""
    if name in PAPER_SYSTEM_NAMES:
        return paper_system(name)
    if name == "onymic_reg":
        # Registration constant across runs; posting swaps.
        return build_system(
            name="onymic_reg", agents=_STANDARD_AGENTS, actions=_STANDARD_ACTIONS,
            runs=[("q1", (("i1", "use(k1)"), ("i2", "use(k2)"),
                          ("k1", "post(c1)"), ("k2", "post(c2)"))),
                  ("q2", (("i1", "use(k1)"), ("i2", "use(k2)"),
                          ("k1", "post(c2)"), ("k2", "post(c1)")))],
            observers={"j": [["q1", "q2"]]})
    if name == "identified_post":
        # Posting constant across runs; registration swaps.
        return build_system(
            name="identified_post", agents=_STANDARD_AGENTS, actions=_STANDARD_ACTIONS,
            runs=[("q1", (("i1", "use(k1)"), ("i2", "use(k2)"),
                          ("k1", "post(c1)"), ("k2", "post(c2)"))),
                  ("q2", (("i1", "use(k2)"), ("i2", "use(k1)"),
                          ("k1", "post(c1)"), ("k2", "post(c2)")))],
            observers={"j": [["q1", "q2"]]})
    if name == "linked":
        return build_system(
            name="linked", agents=_STANDARD_AGENTS, actions=_STANDARD_ACTIONS,
            runs=[("q1", (("i1", "use(k1)"), ("i2", "use(k2)"),
                          ("k1", "post(c1)"), ("k2", "post(c2)")))],
            observers={"j": [["q1"]]})
    if name == "par_swap":
        return build_system(
            name="par_swap",
            agents=(("i1", "real"), ("i2", "real"), ("j", "observer")),
            actions=("act_a(c1)", "act_a(c2)", "act_b(c1)", "act_b(c2)"),
            runs=[("p1", (("i1", "act_a(c1)"), ("i1", "act_b(c1)"),
                          ("i2", "act_a(c2)"), ("i2", "act_b(c2)"))),
                  ("p2", (("i1", "act_a(c2)"), ("i1", "act_b(c2)"),
                          ("i2", "act_a(c1)"), ("i2", "act_b(c1)")))],
            observers={"j": [["p1", "p2"]]})
    if name == "par_single":
        return build_system(
            name="par_single",
            agents=(("i1", "real"), ("i2", "real"), ("j", "observer")),
            actions=("act_a(c1)", "act_a(c2)", "act_b(c1)", "act_b(c2)"),
            runs=[("p1", (("i1", "act_a(c1)"), ("i1", "act_b(c1)")))],
            observers={"j": [["p1"]]})
    raise ValidationError(f"unknown fixture system {name!r}")


FIXTURE_NAMES = PAPER_SYSTEM_NAMES + ("onymic_reg", "identified_post", "linked",
                                      "par_swap", "par_single")

#: Default demo system per claim (hypotheses hold on it).
DEFAULT_SYSTEMS: dict[ClaimId, str] = {
    "C3.1": "s12", "L3.1": "onymic_reg", "L3.2": "identified_post",
    "C3.2": "s1234", "C3.3": "s1234", "C3.4": "onymic_reg",
    "C3.5": "identified_post", "C4.1": "par_swap", "C4.2": "par_swap",
    "CA.1": "s1234", "CA.2": "s1234", "CA.3": "s1234", "CA.4": "s1234",
    "CA.5": "onymic_reg", "CA.6": "identified_post", "CA.7": "linked",
    "CB.1": "par_swap", "CB.2": "par_single", "LA.1": "s1234",
    "LA.2": "s1234", "LA.3": "s1234", "APPC-EQ": "s1234",
}


# ---------------------------------------------------------------------------
# Random generation


@dataclass(frozen=True)
class GenConfig:
    """Deterministic generator configuration.

    Two fact styles: ``uniform`` draws each stage fact independently with
    probability one half (no structure imposed, degenerate systems on
    purpose); ``matching`` makes every first-stage agent perform exactly one
    first-stage action and every intermediary exactly one second-stage
    action (injectively when sizes allow), with per-system coin flips
    deciding whether each stage is constant across runs.  The matching style
    reaches the structured hypotheses (exhaustivity, exclusivity, constant
    stages) that uniform sampling almost never hits.
    """

    n_real: int = 2
    n_pseudo: int = 2
    n_articles: int = 2
    max_runs: int = 4
    partition: str = "single"  # or "random"
    seed: int = 0
    budget: int = 10_000
    flavor: str = "sequential"  # or "parallel"
    style: str = "uniform"  # or "matching"

    def __post_init__(self):
        if min(self.n_real, self.n_pseudo, self.n_articles, self.max_runs) < 1:
            raise ValidationError("generator counts must be at least 1")
        if self.partition not in ("single", "random"):
            raise ValidationError(f"unknown partition policy {self.partition!r}")
        if self.flavor not in ("sequential", "parallel"):
            raise ValidationError(f"unknown flavor {self.flavor!r}")
        if self.style not in ("uniform", "matching"):
            raise ValidationError(f"unknown generator style {self.style!r}")
        if self.budget < 0:
            raise ValidationError("budget must be non-negative")


def _declaration(cfg: GenConfig):
    if cfg.flavor == "sequential":
        agents = ([(f"i{n}", "real") for n in range(1, cfg.n_real + 1)]
                  + [(f"k{n}", "pseudo") for n in range(1, cfg.n_pseudo + 1)]
                  + [("j", "observer")])
        actions = ([f"use(k{n})" for n in range(1, cfg.n_pseudo + 1)]
                   + [f"post(c{n})" for n in range(1, cfg.n_articles + 1)])
        universe = ([(f"i{i}", f"use(k{k})")
                     for i in range(1, cfg.n_real + 1)
                     for k in range(1, cfg.n_pseudo + 1)]
                    + [(f"k{k}", f"post(c{c})")
                       for k in range(1, cfg.n_pseudo + 1)
                       for c in range(1, cfg.n_articles + 1)])
    else:
        agents = ([(f"i{n}", "real") for n in range(1, cfg.n_real + 1)]
                  + [("j", "observer")])
        actions = ([f"act_a(c{n})" for n in range(1, cfg.n_articles + 1)]
                   + [f"act_b(c{n})" for n in range(1, cfg.n_articles + 1)])
        universe = [(f"i{i}", f"{fam}(c{c})")
                    for i in range(1, cfg.n_real + 1)
                    for fam in ("act_a", "act_b")
                    for c in range(1, cfg.n_articles + 1)]
    return agents, actions, universe


def _matching_facts(cfg: GenConfig, rng: random.Random, n_runs: int):
    """Per-run fact lists for the matching style (see GenConfig)."""
    def first_map():
        return [rng.randrange(1, cfg.n_pseudo + 1) for _ in range(cfg.n_real)]

    def second_map():
        if cfg.n_pseudo <= cfg.n_articles:
            return rng.sample(range(1, cfg.n_articles + 1), cfg.n_pseudo)
        return [rng.randrange(1, cfg.n_articles + 1) for _ in range(cfg.n_pseudo)]

    def pair_map():
        return [(rng.randrange(1, cfg.n_articles + 1),
                 rng.randrange(1, cfg.n_articles + 1)) for _ in range(cfg.n_real)]

    first_const = rng.random() < 0.5
    second_const = rng.random() < 0.5
    if cfg.flavor == "sequential":
        fixed_first, fixed_second = first_map(), second_map()
        out = []
        for _ in range(n_runs):
            um = fixed_first if first_const else first_map()
            pm = fixed_second if second_const else second_map()
            facts = [(f"i{i}", f"use(k{um[i - 1]})")
                     for i in range(1, cfg.n_real + 1)]
            facts += [(f"k{k}", f"post(c{pm[k - 1]})")
                      for k in range(1, cfg.n_pseudo + 1)]
            out.append(facts)
        return out
    fixed_pairs = pair_map()
    out = []
    for _ in range(n_runs):
        pairs = fixed_pairs if first_const else pair_map()
        facts = []
        for i, (ca, cb) in enumerate(pairs, start=1):
            facts.append((f"i{i}", f"act_a(c{ca})"))
            facts.append((f"i{i}", f"act_b(c{cb})"))
        out.append(facts)
    return out


def random_system(cfg: GenConfig) -> InterpretedSystem:
    """One random system, a pure function of ``cfg`` (in particular its seed)."""
    rng = random.Random(cfg.seed)
    agents, actions, universe = _declaration(cfg)
    n_runs = rng.randint(1, cfg.max_runs)
    if cfg.style == "matching":
        fact_lists = _matching_facts(cfg, rng, n_runs)
    else:
        fact_lists = [[f for f in universe if rng.random() < 0.5]
                      for _ in range(n_runs)]
    runs = [(f"r{n}", facts) for n, facts in enumerate(fact_lists, start=1)]
    run_ids = [rid for rid, _ in runs]
    if cfg.partition == "single" or n_runs == 1:
        blocks = [run_ids]
    else:
        n_blocks = rng.randint(1, n_runs)
        labels = [rng.randrange(n_blocks) for _ in run_ids]
        grouped: dict[int, list[str]] = {}
        for rid, lab in zip(run_ids, labels):
            grouped.setdefault(lab, []).append(rid)
        blocks = list(grouped.values())
    return build_system(name=f"rnd-{cfg.flavor}-{cfg.seed}", agents=agents,
                        actions=actions, runs=runs, observers={"j": blocks})


def exhaustive_systems(flavor: str = "sequential"):
    """Every system over the 2/2/2 fact universe with at most two distinct
    runs and a single observer block, in canonical order."""
    cfg = GenConfig(flavor=flavor)
    agents, actions, universe = _declaration(cfg)
    n = len(universe)
    assert n == 8

    def facts_of(mask: int):
        return [universe[b] for b in range(n) if mask >> b & 1]

    for mask in range(1 << n):
        yield build_system(name=f"x{mask}", agents=agents, actions=actions,
                           runs=[("r1", facts_of(mask))], observers={"j": [["r1"]]})
    for a in range(1 << n):
        fa = facts_of(a)
        for b in range(a + 1, 1 << n):
            yield build_system(name=f"x{a}-{b}", agents=agents, actions=actions,
                               runs=[("r1", fa), ("r2", facts_of(b))],
                               observers={"j": [["r1", "r2"]]})


# ---------------------------------------------------------------------------
# Sweeps and falsification


@dataclass
class ClaimStats:
    checked: int = 0
    confirmed: int = 0
    vacuous: int = 0
    refuted: int = 0

    @property
    def vacuity_rate(self) -> float:
        return self.vacuous / self.checked if self.checked else 0.0


@dataclass
class SweepReport:
    stats: dict[ClaimId, ClaimStats]
    refutations: list[tuple[ClaimId, InterpretedSystem]]
    implication_violations: list[tuple[ClaimId, ClaimId, str]]
    systems_checked: dict[str, int]
    elapsed: float


@lru_cache(maxsize=64)
def _cached_suite(flavor: str, n_real: int, n_pseudo: int, n_articles: int,
                  bound: int) -> CheckSuite:
    cfg = GenConfig(n_real=n_real, n_pseudo=n_pseudo, n_articles=n_articles,
                    flavor=flavor, seed=0, max_runs=1)
    agents, actions, universe = _declaration(cfg)
    ref = build_system(name="ref", agents=agents, actions=actions,
                       runs=[("r1", universe)], observers={"j": [["r1"]]})
    if flavor == "parallel":
        schema = standard_parallel_schema(ref)
    else:
        schema = standard_sequential_schema(ref)
    return CheckSuite(flavor, schema, "j", ref, bound)


def _random_pool(flavor: str, n_random: int, seed: int):
    """Seeded stream of random systems with varied sizes, cycling through
    both partition policies and both generator styles deterministically."""
    master = random.Random((seed, flavor).__repr__())
    for idx in range(n_random):
        nr = master.randint(1, 3)
        np_ = master.randint(1, 3)
        nc = master.randint(1, 3)
        child = master.getrandbits(48)
        policy = "single" if idx % 2 == 0 else "random"
        style = "uniform" if (idx // 2) % 2 == 0 else "matching"
        cfg = GenConfig(n_real=nr, n_pseudo=np_, n_articles=nc, max_runs=4,
                        partition=policy, seed=child, flavor=flavor,
                        style=style)
        yield cfg, random_system(cfg)


def _sizes_of(system: InterpretedSystem, flavor: str) -> tuple[int, int, int]:
    nr = len(system.agents_with_role("real"))
    np_ = len(system.agents_with_role("pseudo"))
    nc = len({a.param for a in system.actions
              if a.family == ("act_a" if flavor == "parallel" else "post")})
    return nr, max(np_, 1), nc


def _sweep_one(system: InterpretedSystem, flavor: str, claim_ids, stats,
               refutations, violations, bound: int, check_implications: bool):
    nr, np_, nc = _sizes_of(system, flavor)
    suite = _cached_suite(flavor, nr, np_, nc, bound)
    ctx = suite.context(system)
    cache: dict[str, bool] = {}

    def holds(name: str) -> bool:
        v = cache.get(name)
        if v is None:
            v = suite.checker(name).holds(ctx)
            cache[name] = v
        return v

    for cid in claim_ids:
        cdef = CLAIMS[cid]
        st = stats[cid]
        st.checked += 1
        vacuous = False
        for name in cdef.hypotheses:
            if not holds(name):
                vacuous = True
                break
        if vacuous:
            st.vacuous += 1
            continue
        if holds(cdef.conclusion):
            st.confirmed += 1
        else:
            st.refuted += 1
            if len(refutations) < 16:
                refutations.append((cid, system))
    if check_implications:
        for stronger, weaker in HYPOTHESIS_IMPLICATIONS:
            if CLAIMS[stronger].flavor != flavor:
                continue
            if all(holds(n) for n in CLAIMS[stronger].hypotheses):
                for n in CLAIMS[weaker].hypotheses:
                    if not holds(n):
                        violations.append((stronger, weaker,
                                           f"{system.name}: {n} fails"))


def sweep(*, claims=None, n_random: int = 100_000, seed: int = 2026,
          exhaustive: bool = True, bound: int = 2,
          check_implications: bool = True) -> SweepReport:
    """Check registered claims over the exhaustive small universe plus a
    seeded random pool (per flavor).  REFUTED entries in the result indicate
    a genuine bug somewhere: the claims are theorems."""
    if claims is None:
        claims = [cid for cid, cdef in CLAIMS.items() if not cdef.witness_only]
    started = time.monotonic()
    stats = {cid: ClaimStats() for cid in claims}
    refutations: list[tuple[ClaimId, InterpretedSystem]] = []
    violations: list[tuple[ClaimId, ClaimId, str]] = []
    systems_checked = {"sequential": 0, "parallel": 0}
    for flavor in ("sequential", "parallel"):
        flavor_claims = [cid for cid in claims if CLAIMS[cid].flavor == flavor]
        if not flavor_claims:
            continue
        if exhaustive:
            for system in exhaustive_systems(flavor):
                systems_checked[flavor] += 1
                _sweep_one(system, flavor, flavor_claims, stats, refutations,
                           violations, bound, check_implications)
        for _, system in _random_pool(flavor, n_random, seed):
            systems_checked[flavor] += 1
            _sweep_one(system, flavor, flavor_claims, stats, refutations,
                       violations, bound, check_implications)
    return SweepReport(stats, refutations, violations, systems_checked,
                       time.monotonic() - started)


@dataclass
class FalsifyResult:
    claim_id: ClaimId
    dropped: tuple[str, ...]
    found: InterpretedSystem | None
    report: ClaimReport | None
    examined: int
    hypotheses_held: int
    phase: str | None  # "exhaustive" or "random" when found

    @property
    def vacuous(self) -> int:
        return self.examined - self.hypotheses_held


def falsify(claim_id: ClaimId, cfg: GenConfig | None = None, *,
            drop=(), bound: int = 2) -> FalsifyResult:
    """Search for a system whose (remaining) hypotheses hold while the
    conclusion fails.

    Phase one exhausts the tiny 2/2/2 universe (at most two distinct runs,
    single observer block); phase two samples ``cfg.budget`` random systems
    from ``cfg``.  With no dropped hypothesis this searches for refutations
    of a theorem and is expected to come back empty.
    """
    try:
        cdef = CLAIMS[claim_id]
    except KeyError:
        raise ValidationError(f"unknown claim {claim_id!r}") from None
    if cdef.witness_only:
        raise ValidationError(f"claim {claim_id} is witness-only; nothing to falsify")
    dropped = tuple(drop)
    for name in dropped:
        if name not in cdef.hypotheses:
            raise ValidationError(f"claim {claim_id} has no hypothesis {name!r}")
    cfg = replace(cfg or GenConfig(), flavor=cdef.flavor)
    hyp_names = [n for n in cdef.hypotheses if n not in dropped]

    examined = 0
    held = 0

    def try_system(system: InterpretedSystem):
        nonlocal examined, held
        examined += 1
        nr, np_, nc = _sizes_of(system, cdef.flavor)
        suite = _cached_suite(cdef.flavor, nr, np_, nc, bound)
        ctx = suite.context(system)
        for name in hyp_names:
            if not suite.checker(name).holds(ctx):
                return False
        held += 1
        return not suite.checker(cdef.conclusion).holds(ctx)

    for system in exhaustive_systems(cdef.flavor):
        if try_system(system):
            report = check_claim(claim_id, system, drop=dropped, bound=bound)
            return FalsifyResult(claim_id, dropped, system, report, examined,
                                 held, "exhaustive")
    rng = random.Random(cfg.seed)
    for _ in range(cfg.budget):
        child = replace(cfg, seed=rng.getrandbits(48))
        system = random_system(child)
        if try_system(system):
            report = check_claim(claim_id, system, drop=dropped, bound=bound)
            return FalsifyResult(claim_id, dropped, system, report, examined,
                                 held, "random")
    return FalsifyResult(claim_id, dropped, None, None, examined, held, None)


# ---------------------------------------------------------------------------
# Mixer chains


def _as_permutation(mapping, messages) -> dict[str, str]:
    if set(mapping.keys()) != set(messages) or set(mapping.values()) != set(messages):
        raise ValidationError("permutation domain does not match the message set")
    return {m: mapping[m] for m in messages}


def mixer_chain(perm1, perm2, observed_indistinguishability: str = "single",
                messages=None) -> InterpretedSystem:
    """A two-mixer relay modeled as a two-stage system.

    Stage one maps each incoming message to an intermediate slot
    (theta(in_m, use(mid_x))); stage two maps slots to outgoing messages
    (theta(mid_x, post(out_m))).  Each run fixes one concrete pair of
    mappings; ``perm1``/``perm2`` select the run families:

    - a dict: that fixed mapping in every run;
    - ``"all"``: all permutations of the message set;
    - ``"inverse"`` (perm2 only): the run's second mapping is the inverse
      of its first, making the end-to-end relation the identity.

    ``messages`` supplies the domain when neither argument is a dict.
    ``observed_indistinguishability`` is ``"single"`` (one block: the
    observer sees nothing) or ``"discrete"`` (all runs distinguishable).
    """
    domains = [sorted(p.keys()) for p in (perm1, perm2) if isinstance(p, dict)]
    if messages is not None:
        msgs = list(messages)
    elif domains:
        msgs = domains[0]
    else:
        raise ValidationError("mixer_chain needs messages when both stages are symbolic")
    if not msgs or len(set(msgs)) != len(msgs):
        raise ValidationError("messages must be a non-empty set of distinct names")
    for p in (perm1, perm2):
        if isinstance(p, dict) and set(p.keys()) != set(msgs):
            raise ValidationError("permutation domain does not match the message set")
    if perm1 == "inverse":
        raise ValidationError("'inverse' only makes sense for the second stage")
    if observed_indistinguishability not in ("single", "discrete"):
        raise ValidationError(
            f"unknown indistinguishability policy {observed_indistinguishability!r}")

    def family(p):
        if isinstance(p, dict):
            return [_as_permutation(p, msgs)]
        if p == "all":
            return [dict(zip(msgs, image)) for image in permutations(msgs)]
        raise ValidationError(f"cannot interpret {p!r} as a permutation family")

    runs = []
    count = 0
    for p1 in family(perm1):
        if perm2 == "inverse":
            p2s = [{v: k for k, v in p1.items()}]
        else:
            p2s = family(perm2)
        for p2 in p2s:
            count += 1
            facts = ([(f"in_{m}", f"use(mid_{p1[m]})") for m in msgs]
                     + [(f"mid_{x}", f"post(out_{p2[x]})") for x in msgs])
            runs.append((f"r{count}", facts))

    agents = ([(f"in_{m}", "real") for m in msgs]
              + [(f"mid_{m}", "pseudo") for m in msgs]
              + [("j", "observer")])
    actions = ([f"use(mid_{m})" for m in msgs] + [f"post(out_{m})" for m in msgs])
    run_ids = [rid for rid, _ in runs]
    if observed_indistinguishability == "single":
        blocks = [run_ids]
    else:
        blocks = [[rid] for rid in run_ids]
    return build_system(name="mixer_chain", agents=agents, actions=actions,
                        runs=runs, observers={"j": blocks})
