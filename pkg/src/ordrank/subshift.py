"""Subshifts of finite type at desk scale: words, entropy, independence.

One-sided shift spaces over a finite alphabet, presented by forbidden
words and pruned to right-extendable windows, so word counts are counts of
words that actually occur in points of the space.  Entropy comes in two
independent flavours (word-count estimates and the spectral radius of the
transition graph), independence of word pairs is decided exactly by
windowed path search, and density-certified independence feeds the
equivalence-closure towers that power the entropy-rank reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from . import relations
from .ordinals import Ordinal
from .relations import CellRelation, RelationTower

VERDICT_CONSISTENT = "CPE-consistent at evidence"
VERDICT_NOT_CPE = "certified not CPE at evidence"
VERDICT_INDETERMINATE = "indeterminate"


class SubshiftInputError(ValueError):
    """Malformed subshift description; carries a JSON-pointer-style path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class EmptySubshiftError(ValueError):
    """The forbidden words leave no infinite sequences at all."""


class SpectralToleranceError(RuntimeError):
    """Power iteration missed the tolerance; carries the partial value."""

    def __init__(self, message: str, partial: float):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class SubshiftSpec:
    """One-sided shift space over `alphabet` avoiding the `forbidden` words."""

    alphabet: tuple[str, ...]
    forbidden: tuple[str, ...]


def spec_from_dict(data: dict, path: str = "") -> SubshiftSpec:
    if not isinstance(data, dict):
        raise SubshiftInputError(path or "/", "expected an object")
    allowed = {"type", "alphabet", "forbidden"}
    for key in data:
        if key not in allowed:
            raise SubshiftInputError(f"{path}/{key}", "unknown field")
    if data.get("type") != "sft":
        raise SubshiftInputError(f"{path}/type", "expected \"sft\"")
    alphabet = data.get("alphabet")
    if not isinstance(alphabet, list) or not alphabet:
        raise SubshiftInputError(f"{path}/alphabet", "expected a non-empty list")
    for i, sym in enumerate(alphabet):
        if not isinstance(sym, str) or len(sym) != 1:
            raise SubshiftInputError(
                f"{path}/alphabet/{i}", "symbols must be single characters"
            )
    if len(set(alphabet)) != len(alphabet):
        raise SubshiftInputError(f"{path}/alphabet", "symbols must be distinct")
    forbidden = data.get("forbidden")
    if not isinstance(forbidden, list):
        raise SubshiftInputError(f"{path}/forbidden", "expected a list")
    for i, word in enumerate(forbidden):
        if not isinstance(word, str) or not word:
            raise SubshiftInputError(
                f"{path}/forbidden/{i}", "forbidden words must be non-empty strings"
            )
        for ch in word:
            if ch not in alphabet:
                raise SubshiftInputError(
                    f"{path}/forbidden/{i}", f"symbol {ch!r} not in the alphabet"
                )
    spec = SubshiftSpec(alphabet=tuple(alphabet), forbidden=tuple(forbidden))
    build_graph(spec)  # rejects empty subshifts at parse time
    return spec


def parse_subshift(text: str) -> SubshiftSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SubshiftInputError("/", f"invalid JSON: {exc}") from exc
    return spec_from_dict(data)


@dataclass(frozen=True)
class TransitionGraph:
    """Pruned order-m de Bruijn presentation of the shift space.

    States are the allowed m-words with infinite right extensions; an edge
    joins two states when they overlap in m-1 symbols and the joined word
    avoids every forbidden factor.  Every state has out-degree >= 1.
    """

    order: int
    states: tuple[str, ...]
    edges: tuple[tuple[str, ...], ...]  # edges[i] lists successors of states[i]

    def successors(self, state: str) -> tuple[str, ...]:
        return self.edges[self.states.index(state)]


def _admissible(word: str, forbidden: Sequence[str]) -> bool:
    return not any(bad in word for bad in forbidden)


@lru_cache(maxsize=None)
def build_graph(spec: SubshiftSpec) -> TransitionGraph:
    order = max([len(w) for w in spec.forbidden] + [2]) - 1
    candidates = [
        "".join(w)
        for w in product(spec.alphabet, repeat=order)
        if _admissible("".join(w), spec.forbidden)
    ]
    alive = set(candidates)

    def out(word: str) -> list[str]:
        nxt = []
        for symbol in spec.alphabet:
            joined = word + symbol
            target = joined[1:]
            if target in alive and _admissible(joined, spec.forbidden):
                nxt.append(target)
        return nxt

    # prune windows with no infinite right extension
    while True:
        dead = [w for w in alive if not any(t in alive for t in out(w))]
        if not dead:
            break
        alive.difference_update(dead)
    if not alive:
        raise EmptySubshiftError("empty subshift")
    states = tuple(sorted(alive))
    edges = tuple(tuple(sorted(t for t in out(s) if t in alive)) for s in states)
    return TransitionGraph(order=order, states=states, edges=edges)


def count_words(spec: SubshiftSpec, n: int) -> int:
    """Exact number of length-n words occurring in points of the space."""
    if n < 1:
        raise ValueError("word length must be >= 1")
    graph = build_graph(spec)
    m = graph.order
    if n <= m:
        return len({state[:n] for state in graph.states})
    index = {s: i for i, s in enumerate(graph.states)}
    paths = [1] * len(graph.states)
    for _ in range(n - m):
        paths = [
            sum(paths[index[t]] for t in graph.edges[i])
            for i in range(len(graph.states))
        ]
    return sum(paths)


def enumerate_words(spec: SubshiftSpec, n: int) -> list[str]:
    """All length-n words of the space, sorted; for desk-scale n only."""
    if n < 1:
        raise ValueError("word length must be >= 1")
    graph = build_graph(spec)
    m = graph.order
    if n <= m:
        return sorted({state[:n] for state in graph.states})
    words = set()
    frontier = [(s, s) for s in graph.states]
    for _ in range(n - m):
        nxt = []
        for word, state in frontier:
            for t in graph.successors(state):
                nxt.append((word + t[-1], t))
        frontier = nxt
    return sorted({word for word, _ in frontier})


def entropy_estimate(spec: SubshiftSpec, n: int) -> float:
    """log(word count) / n; converges to the entropy from above."""
    return math.log(count_words(spec, n)) / n


def _scc_partition(n: int, succ: list[list[int]]) -> list[list[int]]:
    """Kosaraju strongly connected components, iterative."""
    visited = [False] * n
    order: list[int] = []
    for start in range(n):
        if visited[start]:
            continue
        stack = [(start, iter(succ[start]))]
        visited[start] = True
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if not visited[nxt]:
                    visited[nxt] = True
                    stack.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
            if not advanced:
                order.append(node)
                stack.pop()
    pred: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        for v in succ[u]:
            pred[v].append(u)
    component = [-1] * n
    comps: list[list[int]] = []
    for start in reversed(order):
        if component[start] != -1:
            continue
        comp = [start]
        component[start] = len(comps)
        stack = [start]
        while stack:
            node = stack.pop()
            for nxt in pred[node]:
                if component[nxt] == -1:
                    component[nxt] = len(comps)
                    comp.append(nxt)
                    stack.append(nxt)
        comps.append(comp)
    return comps


def entropy_spectral(
    spec: SubshiftSpec, tol: float = 1e-10, max_iter: int = 50000
) -> float:
    """log of the largest transition eigenvalue, by power iteration per
    strongly connected component (shifted by the identity to kill
    periodicity), maximum over components."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    graph = build_graph(spec)
    index = {s: i for i, s in enumerate(graph.states)}
    succ = [[index[t] for t in graph.edges[i]] for i in range(len(graph.states))]
    best = 0.0
    for comp in _scc_partition(len(graph.states), succ):
        inside = set(comp)
        local = {node: k for k, node in enumerate(comp)}
        a = np.zeros((len(comp), len(comp)))
        has_edge = False
        for node in comp:
            for nxt in succ[node]:
                if nxt in inside:
                    a[local[node], local[nxt]] = 1.0
                    has_edge = True
        if not has_edge:
            continue
        shifted = a + np.eye(len(comp))
        x = np.ones(len(comp)) / math.sqrt(len(comp))
        lam = 1.0
        converged = False
        for _ in range(max_iter):
            y = shifted @ x
            norm = float(np.linalg.norm(y))
            x = y / norm
            lam = float(x @ (shifted @ x))
            residual = float(np.linalg.norm(shifted @ x - lam * x))
            if residual <= tol * max(1.0, lam):
                converged = True
                break
        if not converged:
            raise SpectralToleranceError(
                f"power iteration missed tol={tol} after {max_iter} iterations",
                partial=math.log(max(best, lam - 1.0, 1.0)),
            )
        best = max(best, lam - 1.0)
    # a pruned graph always contains a cycle, so best >= 1
    return math.log(max(best, 1.0))


# -- realizability and independence ---------------------------------------


def realizable(
    spec: SubshiftSpec, constraints: Iterable[tuple[int, str]]
) -> bool:
    """Is some point of the space consistent with every (position, word)
    constraint?  Overlaps are resolved by direct symbol compatibility."""
    graph = build_graph(spec)
    m = graph.order
    assigned: dict[int, str] = {}
    for position, word in constraints:
        if position < 0:
            raise ValueError("positions must be >= 0")
        if not word or any(ch not in spec.alphabet for ch in word):
            raise ValueError(f"word {word!r} is not over the alphabet")
        for offset, symbol in enumerate(word):
            at = position + offset
            if assigned.get(at, symbol) != symbol:
                return False
            assigned[at] = symbol
    if not assigned:
        return True
    length = max(max(assigned) + 1, m)
    frontier = {
        s
        for s in graph.states
        if all(s[i] == assigned.get(i, s[i]) for i in range(m))
    }
    for t in range(1, length - m + 1):
        want = assigned.get(t + m - 1)
        nxt = set()
        for state in frontier:
            for target in graph.successors(state):
                if want is None or target[-1] == want:
                    nxt.add(target)
        frontier = nxt
        if not frontier:
            return False
    return bool(frontier)


def is_independent(
    spec: SubshiftSpec, u: str, v: str, positions: Iterable[int]
) -> bool:
    """Can `u` and `v` be prescribed in every combination at `positions`?"""
    if len(u) != len(v):
        raise ValueError("the two words must have equal length")
    jset = sorted(set(positions))
    if not jset:
        return True
    if u == v:
        return realizable(spec, [(j, u) for j in jset])
    for choice in product((u, v), repeat=len(jset)):
        if not realizable(spec, list(zip(jset, choice))):
            return False
    return True


@dataclass(frozen=True)
class IndependenceCertificate:
    """Anchor slots inside [0, horizon) where `u`/`v` may be freely prescribed.

    Words are anchored at multiples of their length (`stride`), so two
    prescriptions never overlap; slot j means shift position j * stride.
    Construction re-verifies every assignment, so holding a certificate
    object is proof at its stated horizon and density (the density is the
    fraction of the horizon's slots that are independent).
    """

    spec: SubshiftSpec
    u: str
    v: str
    horizon: int
    positions: tuple[int, ...]
    stride: int = 1

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if not all(0 <= j < self.horizon for j in self.positions):
            raise ValueError("positions must lie inside [0, horizon)")
        raw = [j * self.stride for j in self.positions]
        if not is_independent(self.spec, self.u, self.v, raw):
            raise ValueError("certificate does not verify")

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.positions), self.horizon)

    @property
    def shift_positions(self) -> tuple[int, ...]:
        return tuple(j * self.stride for j in self.positions)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    raise TypeError(f"cannot read {value!r} as a density")


class _NodeBudget:
    def __init__(self, limit: int | None):
        self.limit = limit
        self.used = 0

    def spend(self):
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            raise _BudgetExceeded


class _BudgetExceeded(Exception):
    pass


def _search_independence(
    spec: SubshiftSpec,
    u: str,
    v: str,
    horizon: int,
    target: int,
    budget: _NodeBudget,
) -> tuple[int, ...] | None:
    """Lexicographic branch and bound for an independence set of `target`
    anchor slots inside [0, horizon); complete, so None means none exists.

    Slots stride by the word length, so candidate prescriptions never
    overlap each other.
    """
    stride = len(u)

    def extend(start: int, chosen: list[int]) -> tuple[int, ...] | None:
        if len(chosen) >= target:
            return tuple(chosen)
        for j in range(start, horizon):
            if len(chosen) + (horizon - j) < target:
                break
            budget.spend()
            raw = [p * stride for p in chosen + [j]]
            if is_independent(spec, u, v, raw):
                found = extend(j + 1, chosen + [j])
                if found is not None:
                    return found
        return None

    return extend(0, [])


def independence_status(
    spec: SubshiftSpec,
    u: str,
    v: str,
    horizon: int,
    density,
    node_budget: int | None = None,
) -> tuple[str, IndependenceCertificate | None]:
    """One of ("certified", cert), ("refuted", None), ("unknown", None).

    Refutation is sound: the search is exhaustive, so failure means no set
    of the required size exists within the horizon.  "unknown" only occurs
    when a node budget interrupts the search.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    r = as_fraction(density)
    if not 0 < r <= 1:
        raise ValueError("density must lie in (0, 1]")
    target = max(1, math.ceil(r * horizon))
    budget = _NodeBudget(node_budget)
    try:
        found = _search_independence(spec, u, v, horizon, target, budget)
    except _BudgetExceeded:
        return ("unknown", None)
    if found is None:
        return ("refuted", None)
    cert = IndependenceCertificate(
        spec=spec, u=u, v=v, horizon=horizon, positions=found, stride=len(u)
    )
    return ("certified", cert)


def find_independence_set(
    spec: SubshiftSpec,
    u: str,
    v: str,
    horizon: int,
    density,
    node_budget: int | None = None,
) -> IndependenceCertificate | None:
    """Deterministic search for a density certificate; absence is a value.

    Candidate positions are the `horizon` anchor slots striding by the
    word length (for single symbols, just the positions 0..horizon-1).
    """
    status, cert = independence_status(spec, u, v, horizon, density, node_budget)
    return cert


# -- independence-evidence relations and the entropy-rank report -----------


@dataclass
class LevelEvidence:
    """All length-n word pairs with their independence status at (H, r)."""

    n: int
    words: tuple[str, ...]
    lower: CellRelation
    upper: CellRelation
    statuses: dict[tuple[str, str], str]
    certificates: dict[tuple[str, str], IndependenceCertificate]


def ie_evidence(
    spec: SubshiftSpec,
    n: int,
    horizon: int,
    density,
    node_budget: int | None = None,
) -> LevelEvidence:
    words = tuple(enumerate_words(spec, n))
    sp = relations.space(words)
    lower_pairs = []
    upper_pairs = []
    statuses: dict[tuple[str, str], str] = {}
    certificates: dict[tuple[str, str], IndependenceCertificate] = {}
    for i, u in enumerate(words):
        for v in words[i:]:
            status, cert = independence_status(
                spec, u, v, horizon, density, node_budget
            )
            statuses[(u, v)] = statuses[(v, u)] = status
            if cert is not None:
                certificates[(u, v)] = certificates[(v, u)] = cert
            if status == "certified":
                lower_pairs.extend([(u, v), (v, u)])
                upper_pairs.extend([(u, v), (v, u)])
            elif status == "unknown":
                upper_pairs.extend([(u, v), (v, u)])
    lower = CellRelation.from_pairs(sp, lower_pairs)
    upper = CellRelation.from_pairs(sp, upper_pairs)
    return LevelEvidence(
        n=n,
        words=words,
        lower=lower,
        upper=upper,
        statuses=statuses,
        certificates=certificates,
    )


def ie_relation(
    spec: SubshiftSpec,
    n: int,
    horizon: int,
    density,
    node_budget: int | None = None,
) -> tuple[CellRelation, CellRelation]:
    """(lower, upper) independence-evidence relations on length-n words.

    `lower` holds the pairs with a verified density certificate, `upper`
    the pairs not refuted by the exhaustive horizon search; lower is always
    contained in upper.  Diagonal pairs are included when certified.
    """
    evidence = ie_evidence(spec, n, horizon, density, node_budget)
    domain = relations.RelationDomain(evidence.lower.space)
    assert domain.leq(evidence.lower, evidence.upper)
    return evidence.lower, evidence.upper


@dataclass
class EntropyRankLevel:
    n: int
    cells: int
    lower_reach_top: bool | None
    upper_reach_top: bool | None
    stabilization_stage: Ordinal | None
    diagonal_certified: tuple[str, ...]
    budget_exhausted: bool


@dataclass
class EntropyRankReport:
    spec: SubshiftSpec
    n_max: int
    horizon: int
    density: Fraction
    budget: int
    levels: list[EntropyRankLevel]
    verdict: str


def _propagate_down(
    evidences: list[LevelEvidence], pick
) -> list[CellRelation]:
    """Per-level evidence closed downward under prefix projection.

    A certificate for longer words prescribes their prefixes at the same
    shift positions, so it is genuine evidence for the prefix pair even
    when the coarser level's own stride missed it; projecting evidence
    down therefore only adds sound pairs, and makes the resulting tower
    projection-consistent by construction.
    """
    adjusted = [pick(ev) for ev in evidences]
    for i in range(len(evidences) - 2, -1, -1):
        n = evidences[i].n
        sp = adjusted[i].space
        projected = CellRelation.from_pairs(
            sp, [(u[:n], v[:n]) for u, v in adjusted[i + 1].pairs()]
        )
        adjusted[i] = relations.RelationDomain(sp).finite_join(
            [adjusted[i], projected]
        )
    return adjusted


def _evidence_tower(
    evidences: list[LevelEvidence], leveled: list[CellRelation]
) -> RelationTower:
    """Tower of diagonal-stripped evidence relations, coarsest first.

    The diagonal carries no closure information (every gamma stage is
    reflexive), so stripping it makes the per-level stabilization stage
    count the closure work; verdicts are unchanged because the limits
    coincide.
    """
    levels = []
    previous: LevelEvidence | None = None
    for ev, rel in zip(evidences, leveled):
        if previous is None:
            sp = relations.space(ev.words)
        else:
            sp = relations.space(ev.words, {w: w[: previous.n] for w in ev.words})
        stripped = relations.strip_diagonal(rel)
        levels.append((sp, CellRelation(space=sp, rows=stripped.rows)))
        previous = ev
    return RelationTower(levels=tuple(levels))


def entropy_rank_report(
    spec: SubshiftSpec,
    n_max: int,
    horizon: int,
    density,
    budget: int,
    node_budget: int | None = None,
) -> EntropyRankReport:
    """Gamma-tower verdicts over independence evidence at resolutions 1..n_max.

    "certified not CPE at evidence" is sound (the upper relation stabilized
    strictly below all-pairs at some level); "CPE-consistent at evidence"
    records that nothing in the evidence obstructs full closure; anything
    else is indeterminate.  All evidence parameters ride along in the
    report so no verdict is quotable without its scope.
    """
    if n_max < 1 or horizon < 1 or budget < 1:
        raise ValueError("parameters must be positive")
    r = as_fraction(density)
    evidences = [
        ie_evidence(spec, n, horizon, r, node_budget) for n in range(1, n_max + 1)
    ]
    lower_levels = _propagate_down(evidences, lambda ev: ev.lower)
    upper_levels = _propagate_down(evidences, lambda ev: ev.upper)
    lower_run = relations.gamma_tower_iterate(
        _evidence_tower(evidences, lower_levels), budget
    )
    upper_run = relations.gamma_tower_iterate(
        _evidence_tower(evidences, upper_levels), budget
    )
    levels = []
    certified_not = False
    all_top = True
    for ev, low, up in zip(evidences, lower_run.levels, upper_run.levels):
        diagonal = tuple(w for w in ev.words if ev.statuses[(w, w)] == "certified")
        levels.append(
            EntropyRankLevel(
                n=ev.n,
                cells=len(ev.words),
                lower_reach_top=low.reach_top,
                upper_reach_top=up.reach_top,
                stabilization_stage=up.stabilization_stage,
                diagonal_certified=diagonal,
                budget_exhausted=low.budget_exhausted or up.budget_exhausted,
            )
        )
        if up.reach_top is False:
            certified_not = True
        if low.reach_top is not True or up.reach_top is not True:
            all_top = False
    if certified_not:
        verdict = VERDICT_NOT_CPE
    elif all_top:
        verdict = VERDICT_CONSISTENT
    else:
        verdict = VERDICT_INDETERMINATE
    return EntropyRankReport(
        spec=spec,
        n_max=n_max,
        horizon=horizon,
        density=r,
        budget=budget,
        levels=levels,
        verdict=verdict,
    )
