"""Walk the limit-point derivative over countable ordinal spaces.

Each stage strips the isolated points of the previous stage; the rank is
the first stage at which nothing changes.  For the space [0, gamma] the
rank is leading_exponent(gamma) + 1, and the engine verifies the closed
form by spot-checking stages.
"""

from ordrank import (
    OrdinalSpaceDomain,
    cb_operator,
    cb_rank,
    format_ordinal,
    full_space,
    iterate_steps,
    member,
    parse_ordinal,
    rank_closed_form,
)

print("=== Stepwise derivative on [0, w] ===")
gamma = parse_ordinal("w")
domain = OrdinalSpaceDomain(gamma)
trace = iterate_steps(domain, cb_operator(), full_space(gamma), max_steps=10)
for index, stage in trace.stages:
    size = domain.size_metric(stage)
    print(f"  stage {format_ordinal(index)}: size={size}")
print(f"  rank: {format_ordinal(trace.rank)} (exact={trace.is_exact})")
print(f"  iteration empties the space: {domain.equal(trace.stable_part, domain.bottom)}")
print()

print("=== Membership of the first derivative of [0, w^2*3] ===")
gamma = parse_ordinal("w^2*3")
domain = OrdinalSpaceDomain(gamma)
first = cb_operator().apply(full_space(gamma))
for text in ("5", "w", "w*7", "w^2", "w^2*2+w", "w^2*2+1"):
    delta = parse_ordinal(text)
    print(f"  {text:>10} is a limit point: {member(delta, first)}")
print()

print("=== Closed-form ranks across a small grid ===")
for text in ("0", "17", "w", "w*5+3", "w^2", "w^2*3+5", "w^4+w^2", "w^w"):
    gamma = parse_ordinal(text)
    rank = cb_rank(gamma)
    line = f"  [0, {text}] has rank {format_ordinal(rank)}"
    if text not in ("0",):
        domain = OrdinalSpaceDomain(gamma)
        result = rank_closed_form(domain, cb_operator(), full_space(gamma))
        line += f" (engine verified: {result.verified})"
    print(line)
