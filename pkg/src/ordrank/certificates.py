"""Finite order codes and rank-witness verification for expansions.

An `OrderCode` is a finite linear order on a set of naturals containing 0
as minimum, stored as the bit matrix x(m, n).  A `RankCertificate` pairs a
code with a chain of closed sets assigned to its elements; the verifiers
check the chain-containment conditions that make an accepted certificate a
sound lower bound for the expansion rank of the target (mode R) or an
exact witness (mode S, which additionally requires the images to join to
the whole space).  `make_certificate` supplies the constructive direction
from an exact engine trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from . import engine
from .ordinals import ZERO, Ordinal, from_int


class InvalidOrderCodeError(ValueError):
    """Order-code invariants failed; carries the violation report."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class CertificateRefusedError(ValueError):
    """make_certificate preconditions failed; carries the offending stage."""

    def __init__(self, message: str, stage):
        super().__init__(message)
        self.stage = stage


@dataclass(frozen=True)
class OrderCode:
    """Bit matrix of a linear order on a finite support of naturals.

    (m, n) in `ones` encodes x(m, n) = 1; the support is {m : x(m, m) = 1}
    and m <= n in the coded order iff both are in the support and
    x(m, n) = 1.  Valid codes have 0 as minimum, so finite support makes
    the order automatically a well-order.
    """

    ones: frozenset[tuple[int, int]]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(m for m, n in self.ones if m == n)

    @classmethod
    def from_chain(cls, elements: list[int]) -> "OrderCode":
        """Code the order in which `elements` are listed."""
        ones = set()
        for i, m in enumerate(elements):
            for n in elements[i:]:
                ones.add((m, n))
        return cls(ones=frozenset(ones))


def code_violations(x: OrderCode) -> list[str]:
    out = []
    support = x.support
    for m, n in x.ones:
        if m not in support or n not in support:
            out.append(f"bit ({m},{n}) set outside the support")
    if 0 not in support:
        out.append("0 is not in the support")
    else:
        for m in support:
            if (0, m) not in x.ones:
                out.append(f"0 is not below {m}")
    for m in support:
        for n in support:
            below = (m, n) in x.ones
            above = (n, m) in x.ones
            if m != n and below and above:
                out.append(f"{m} and {n} are mutually comparable (antisymmetry)")
            if not below and not above:
                out.append(f"{m} and {n} are incomparable (totality)")
    for m in support:
        for n in support:
            for p in support:
                if (m, n) in x.ones and (n, p) in x.ones and (m, p) not in x.ones:
                    out.append(f"transitivity fails through {m},{n},{p}")
    return out


def validate_order_code(x: OrderCode) -> bool:
    """True iff the bits encode a total order on the support with 0 minimum."""
    return not code_violations(x)


def order_elements(x: OrderCode) -> list[int]:
    """Support listed in increasing coded order; requires a valid code."""
    violations = code_violations(x)
    if violations:
        raise InvalidOrderCodeError(violations)
    return sorted(x.support, key=lambda m: sum(1 for n in x.support if (n, m) in x.ones))


def order_type(x: OrderCode) -> Ordinal:
    """Order type of the coded well-order; finite support, so a natural."""
    return from_int(len(order_elements(x)))


def successor_code(x: OrderCode) -> OrderCode:
    """Adjoin the least unused natural as the new maximum."""
    elements = order_elements(x)
    fresh = 0
    while fresh in x.support:
        fresh += 1
    return OrderCode.from_chain(elements + [fresh])


@dataclass
class RankCertificate:
    """Order code plus witness chain for the rank of `target` under an
    expansion; `mode` is the wire-format claim tag ("R" lower bound, "S"
    exact)."""

    order: OrderCode
    target: Any
    assignment: dict[int, Any]
    mode: str = "R"

    def __post_init__(self):
        if self.mode not in ("R", "S"):
            raise ValueError(f"mode must be 'R' or 'S', got {self.mode!r}")


def _checked_elements(
    domain: engine.SetDomain, op: engine.MonotoneOperator, cert: RankCertificate
) -> list[int]:
    if op.kind != engine.EXPANSION:
        raise ValueError("certificates witness ranks of expansions")
    elements = order_elements(cert.order)  # raises on invalid codes
    missing = [m for m in elements if m not in cert.assignment]
    if missing:
        raise ValueError(f"assignment is missing elements {missing}")
    return elements


def verify_lower_bound(
    domain: engine.SetDomain, op: engine.MonotoneOperator, cert: RankCertificate
) -> bool:
    """Chain-containment check: accepted certificates have order type at
    most the expansion rank of the target.

    Requires h(0) = target, every h(m) strictly below top, and for every
    later element the join of the images of its predecessors to stay
    inside its own set.
    """
    elements = _checked_elements(domain, op, cert)
    h = cert.assignment
    if not domain.equal(h[elements[0]], cert.target):
        return False
    for m in elements:
        if domain.equal(h[m], domain.top):
            return False
    for i, m in enumerate(elements[1:], start=1):
        joined = domain.finite_join([op.apply(h[n]) for n in elements[:i]])
        if not domain.leq(joined, h[m]):
            return False
    return True


def verify_exact_rank(
    domain: engine.SetDomain, op: engine.MonotoneOperator, cert: RankCertificate
) -> bool:
    """Lower-bound conditions plus the join of all images filling the space;
    accepted certificates pin the rank exactly."""
    if not verify_lower_bound(domain, op, cert):
        return False
    elements = order_elements(cert.order)
    joined = domain.finite_join([op.apply(cert.assignment[m]) for m in elements])
    return domain.equal(joined, domain.top)


def make_certificate(
    domain: engine.SetDomain,
    op: engine.MonotoneOperator,
    start,
    k: int,
    mode: str = "R",
    max_steps: int = 64,
) -> RankCertificate:
    """Certificate of order type k from the first k iteration stages.

    Requires an exact engine rank of at least k; the witness chain is
    h(i) = the i-th stage, which verify_lower_bound accepts by
    construction, and which verify_exact_rank accepts when k equals the
    rank of a target whose stable part is the whole space.
    """
    if k < 1:
        raise ValueError("order type must be >= 1")
    trace = engine.iterate_steps(domain, op, start, max_steps)
    if not trace.is_exact:
        raise CertificateRefusedError(
            f"rank not exact within {max_steps} steps", stage=trace.rank
        )
    rank = trace.rank.to_int()
    if rank < k:
        raise CertificateRefusedError(
            f"requested order type {k} exceeds the exact rank {rank}",
            stage=trace.rank,
        )
    stages = [trace.value_at(i) for i in range(k)]
    for i, value in enumerate(stages):
        if domain.equal(value, domain.top):
            raise CertificateRefusedError(
                f"stage {i} already fills the space", stage=from_int(i)
            )
    order = OrderCode.from_chain(list(range(k)))
    assignment = {i: stages[i] for i in range(k)}
    return RankCertificate(order=order, target=start, assignment=assignment, mode=mode)


def extract_embedding(
    domain: engine.SetDomain,
    op: engine.MonotoneOperator,
    cert: RankCertificate,
    trace: engine.IterationTrace,
) -> dict[int, Ordinal]:
    """Order-preserving map from the code into the iteration stages.

    Element m maps to the least stage whose successor image escapes the
    join of the images of m's predecessors; strict monotonicity along the
    code is asserted, failure indicating a verifier or domain bug.
    """
    if not trace.is_exact:
        raise engine.IndeterminateTraceError("trace is budget-limited")
    if not verify_lower_bound(domain, op, cert):
        raise ValueError("certificate was not accepted; nothing to extract")
    rank = trace.rank.to_int()
    elements = order_elements(cert.order)
    h = cert.assignment
    embedding: dict[int, Ordinal] = {elements[0]: ZERO}
    previous = 0  # the first element sits at stage 0
    for i, m in enumerate(elements[1:], start=1):
        joined = domain.finite_join([op.apply(h[n]) for n in elements[:i]])
        found = None
        for alpha in range(rank):
            if not domain.leq(trace.value_at(alpha + 1), joined):
                found = alpha
                break
        if found is None:
            raise engine.UnsupportedDomainError(
                "no escaping stage; target does not fill the space"
            )
        if found <= previous:
            raise RuntimeError(
                "extracted embedding is not strictly increasing; "
                "verifier or domain bug"
            )
        previous = found
        embedding[m] = from_int(found)
    return embedding
