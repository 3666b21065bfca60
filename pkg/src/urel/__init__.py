"""Under-approximate relational reasoning for the IMP language.

Programs are parsed and run by :mod:`urel.imp` and :mod:`urel.parse`,
relations live in :mod:`urel.assertions`, bounded validity is decided by
:mod:`urel.oracle`, derivations are checked by :mod:`urel.kernel`, and
:mod:`urel.decomp` and :mod:`urel.insecurity` build on those.
"""
from .assertions import (FALSE, TRUE, Family, Relation, assign_post, equivalent_on, flip,
                         implies_on, normalize, predicate, satisfiable_on)
from .corpus import corpus_path, load_program
from .decomp import (DecompRelation, check_lemma_decomp, check_skip_bridge, check_theorem_decomp,
                     decomp, decomp_eval)
from .domain import DomainTooLarge, SearchDomain, domain
from .imp import (Command, FuelExhausted, ImpOverflowError, State, Terminated, exec_command,
                  format_command)
from .insecurity import (SecurityPolicy, ViolationWitness, certify, certify_direct,
                         find_violation, low_equiv)
from .kernel import CheckReport, Derivation, Triple, check_derivation
from .oracle import Verdict, hoare_valid_under, reachable_finals, relational_valid
from .parse import ParseError, parse_aexp, parse_bexp, parse_command, parse_relation
from .script import ProofScript, format_script, load_script, parse_script

__version__ = "0.1.0"

__all__ = [
    "FALSE", "TRUE", "CheckReport", "Command", "DecompRelation", "Derivation", "DomainTooLarge",
    "Family", "FuelExhausted", "ImpOverflowError", "ParseError", "ProofScript", "Relation",
    "SearchDomain", "SecurityPolicy", "State", "Terminated", "Triple", "Verdict",
    "ViolationWitness", "assign_post", "certify", "certify_direct", "check_derivation",
    "check_lemma_decomp", "check_skip_bridge", "check_theorem_decomp", "corpus_path", "decomp",
    "decomp_eval", "domain", "equivalent_on", "exec_command", "find_violation", "flip",
    "format_command", "format_script", "hoare_valid_under", "implies_on", "load_program",
    "load_script", "low_equiv", "normalize", "parse_aexp", "parse_bexp", "parse_command",
    "parse_relation", "parse_script", "predicate", "reachable_finals", "relational_valid",
    "satisfiable_on",
]
