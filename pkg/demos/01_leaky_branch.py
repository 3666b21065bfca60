"""A branch on a secret, from first run to checked proof."""
# %%
from urel import (SearchDomain, SecurityPolicy, check_derivation, certify, corpus_path,
                  exec_command, find_violation, load_program, load_script, low_equiv,
                  relational_valid)
from urel.imp import State

program = load_program("fig3_left")
print(program)

# %% Two runs that agree on low but not on x end with different values of low.
for start in (State(x=0), State(x=1)):
    print(start.as_dict(), "->", exec_command(program, start, fuel=10).state.as_dict())

# %% Search a small domain for the least such pair and certify it.
dom = SearchDomain({"x": (0, 1), "low": (0, 1)}, fuel=16)
policy = SecurityPolicy(("low",))
witness = find_violation(program, policy, dom)
cert = certify(program, witness, policy, dom)
print("witness", witness.to_json())
print("checks", cert.checks())

# The certificate boils down to one under-approximate triple: from
# low-equivalent starts the program can reach exactly the witness pair.
L = low_equiv(policy)
print(relational_valid(L, program, program, witness.post, cert.domain))

# %% The same fact as a derivation: matched branches, then weakening.
script = load_script(corpus_path("fig3_left.proof"))
report = check_derivation(script.derivation, script.search_domain())
print(report.summary())
