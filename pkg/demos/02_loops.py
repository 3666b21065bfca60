"""Leaks behind loops, at desk scale and at full size."""
# %%
import time

from urel import (SearchDomain, SecurityPolicy, certify, certify_direct, check_derivation,
                  corpus_path, find_violation, load_program, load_script)

policy = SecurityPolicy(("low",))
middle = load_program("fig3_middle")
right = load_program("fig3_right")

# %% Scaled programs: enumerate every start pair over {0, 1, 2}.
for name, program, names in (("middle", middle, ("n", "y", "x", "low", "high")),
                             ("right", right, ("x", "low", "high"))):
    dom = SearchDomain({v: (0, 1, 2) for v in names}, fuel=16)
    w = find_violation(program, policy, dom)
    print(name, w.to_json(), "certified:", certify(program, w, policy, dom).ok)

# %% The right program needs two backwards variants, one before the leaking
# iteration and one after it. The proof script spells both out.
script = load_script(corpus_path("fig3_right.proof"))
print(check_derivation(script.derivation, script.search_domain()).summary())
print(sorted({node.rule for _, node in script.derivation.nodes()}))

# %% Full constants are far beyond enumeration, but one pair of runs is enough.
start = time.perf_counter()
full = load_program("fig3_right_full")
cert = certify_direct(full, {}, {"high": 1}, policy)
print(cert.witness.to_json(), cert.ok, f"{time.perf_counter() - start:.2f}s")
