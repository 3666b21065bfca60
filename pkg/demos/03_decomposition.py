"""Splitting a two-program triple into one-program triples."""
# %%
from urel import (SearchDomain, check_lemma_decomp, check_skip_bridge, check_theorem_decomp,
                  decomp, load_program, parse_relation)

program = load_program("fig3_left")
dom = SearchDomain({"x": (0, 1), "low": (0, 1)}, fuel=16)
L = parse_relation("low<1> == low<2>")
post = parse_relation("low<1> == 1 && low<2> == 0")

# %% decomp relates a final state of the first run to a start of the second.
d = decomp(L, program, program, post, dom)
for t, s2 in sorted(d.pairs, key=lambda p: (sorted(p[0].items()), sorted(p[1].items()))):
    print("t =", t.as_dict(dom.variables), " s' =", s2.as_dict(dom.variables))

# %% The triple is invalid here (x is left free), and both sides agree on that.
print(check_lemma_decomp(L, program, program, post, dom, d))
print(check_skip_bridge(L, program, post, dom))
print(check_theorem_decomp(L, program, program, post, dom, d).theorem)

# %% Pinning x makes it valid, again on both sides.
pinned = parse_relation("low<1> == 1 && low<2> == 0 && x<1> == 1 && x<2> == 0")
print(check_theorem_decomp(L, program, program, pinned, dom).theorem)
