"""Build, verify, corrupt and decode rank-witness certificates.

A certificate pairs a finite order code with a chain of sets; acceptance
of the chain-containment conditions proves the order type is a lower
bound for the expansion rank of the target, and the join condition pins
the rank exactly.  Corrupting any single field flips acceptance.
"""

from ordrank import (
    IntervalSpaceDomain,
    RankCertificate,
    extract_embedding,
    format_ordinal,
    interval,
    iterate_steps,
    make_certificate,
    order_type,
    parse_ordinal,
    succ_expansion_operator,
    verify_exact_rank,
    verify_lower_bound,
)
from ordrank.ordinals import ONE

gamma = parse_ordinal("w^3")
domain = IntervalSpaceDomain(gamma)
op = succ_expansion_operator()
start = interval(gamma, ONE)

trace = iterate_steps(domain, op, start, max_steps=16)
rank = trace.rank.to_int()
print(f"=== Endpoint expansion of [0,1] inside [0, w^3] ===")
print(f"  engine rank: {rank}")
for index, stage in trace.stages:
    endpoint = "empty" if stage.is_empty else format_ordinal(stage.endpoint)
    print(f"  stage {format_ordinal(index)}: [0, {endpoint}]")
print()

print("=== Certificates of each order type up to the rank ===")
for k in range(1, rank + 1):
    cert = make_certificate(domain, op, start, k)
    print(f"  type {format_ordinal(order_type(cert.order))}: "
          f"lower bound accepted={verify_lower_bound(domain, op, cert)}, "
          f"exact accepted={verify_exact_rank(domain, op, cert)}")
print()

print("=== Corruption flips acceptance ===")
cert = make_certificate(domain, op, start, rank)
broken = dict(cert.assignment)
broken[1] = start  # stall the chain at its first step
corrupt = RankCertificate(order=cert.order, target=start, assignment=broken)
print(f"  stalled chain accepted: {verify_lower_bound(domain, op, corrupt)}")
print()

print("=== Embedding an accepted witness into the iteration stages ===")
embedding = extract_embedding(domain, op, cert, trace)
for element, stage in sorted(embedding.items()):
    print(f"  order element {element} -> stage {format_ordinal(stage)}")
