"""Building derivations in code, printing them, and breaking them on purpose."""
# %%
from urel import SearchDomain, check_derivation, format_script, parse_command, parse_relation
from urel import kernel as K
from urel.mutate import mutation_score

dom = SearchDomain({"low": (0, 1)})
L = parse_relation("low<1> == low<2>")
c1, c2 = parse_command("low := 1"), parse_command("low := 0")

# %% One matched assignment, weakened to a post that breaks L.
step = K.assign_matched(L, c1, c2)
proof = K.conseq(L, parse_relation("low<1> == 1 && low<2> == 0"), step)
print(format_script(proof, dom))
print(check_derivation(proof, dom).summary())

# %% Every single-node mutation should be caught.
score = mutation_score(proof, dom)
print(f"{score.detected}/{score.total} mutants detected")
for m in score.survivors:
    print("survivor:", m.path, m.kind)

# %% A Conseq that claims too much is rejected with a concrete pair.
greedy = K.conseq(L, parse_relation("low<1> != low<2>"), step)
print(check_derivation(greedy, dom).summary())
