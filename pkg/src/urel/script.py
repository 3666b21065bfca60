"""Text format for derivations (``.proof`` files).

A script is a sequence of declarations followed by one derivation::

    domain { x = 0..1; low = 0..1; fuel = 16; nmax = 2; }
    let L = low<1> == low<2>;
    family R(n) = x<1> == n && x<2> == n;
    cmd P = if x > 0 then low := 1 else low := 0;

    rule Conseq {
      conclusion: < L > $P , $P < low<1> == 1 && low<2> == 0 >;
      children: [
        rule IfMatchedTF { ... }
      ]
    }

Inside relations a declared ``let`` name stands for its relation and a family
name applied to an index (``R(n + 1)``) for a family instance; ``$P`` inside
programs stands for a declared command. ``witness:`` names a family (for the
backwards-variant rules) or gives a relation (the midpoint of ``Seq1`` and
``SeqMatched``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from . import assertions as A
from . import imp
from .domain import SearchDomain
from .kernel import Derivation, Triple
from .parse import Parser, Scope


@dataclass
class ProofScript:
    derivation: Derivation
    domain: dict = field(default_factory=dict)
    scope: Scope = field(default_factory=Scope)

    def search_domain(self, **overrides) -> SearchDomain:
        """The declared domain, with keyword overrides (``values`` is merged)."""
        values = dict(self.domain.get("values", {}))
        values.update(overrides.pop("values", None) or {})
        kwargs = {k: self.domain[k] for k in ("fuel", "n_max", "quantifier_values") if k in self.domain}
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return SearchDomain(values, **kwargs)


class _ScriptParser(Parser):
    def __init__(self, text: str):
        super().__init__(text, Scope({}, {}, {}))
        self.domain: dict = {}

    def script(self) -> ProofScript:
        while not self.at("rule"):
            if self.accept("domain"):
                self.domain_block()
            elif self.accept("let"):
                name = self.ident("relation name")
                self.expect("=")
                self.scope.lets[name] = self.relation()
                self.expect(";")
            elif self.accept("family"):
                name = self.ident("family name")
                self.expect("(")
                if self.ident("parameter") != "n":
                    raise self.error("family parameter must be spelled n")
                self.expect(")")
                self.expect("=")
                body = self.relation()
                self.expect(";")
                self.scope.families[name] = A.Family(name, body)
            elif self.accept("cmd"):
                name = self.ident("command name")
                self.expect("=")
                self.scope.commands[name] = self.statement()
                self.expect(";")
            else:
                raise self.error("expected declaration or derivation", "domain", "let", "family", "cmd", "rule")
        d = self.node()
        self.expect_eof()
        return ProofScript(d, self.domain, self.scope)

    def int_value(self) -> int:
        neg = self.accept("-")
        t = self.tok
        if t.kind != "INT":
            raise self.error("expected integer", "integer")
        self.advance()
        return -int(t.text) if neg else int(t.text)

    def value_set(self) -> list[int]:
        if self.accept("{"):
            vals = [self.int_value()]
            while self.accept(","):
                vals.append(self.int_value())
            self.expect("}")
            return vals
        lo = self.int_value()
        self.expect("..")
        hi = self.int_value()
        return list(range(lo, hi + 1))

    def domain_block(self) -> None:
        self.expect("{")
        values = self.domain.setdefault("values", {})
        while not self.accept("}"):
            key = self.ident("domain entry")
            self.expect("=")
            if key == "fuel":
                self.domain["fuel"] = self.int_value()
            elif key in ("nmax", "n_max"):
                self.domain["n_max"] = self.int_value()
            elif key == "qvals":
                self.domain["quantifier_values"] = self.value_set()
            else:
                values[key] = self.value_set()
            self.accept(";")

    def triple(self) -> Triple:
        self.expect("<")
        pre = self.relation()
        self.expect(">")
        left = self.program()
        self.expect(",")
        right = self.program()
        self.expect("<")
        post = self.relation()
        self.expect(">")
        return Triple(pre, left, right, post)

    def node(self) -> Derivation:
        self.expect("rule")
        start = self.tok
        name = self.ident("rule name")
        while self.accept("-"):
            name += "-" + self.ident("rule name")
        self.expect("{")
        conclusion: Optional[Triple] = None
        witness: Union[A.Relation, A.Family, None] = None
        children: list[Derivation] = []
        while not self.accept("}"):
            key = self.ident("field name")
            self.expect(":")
            if key == "conclusion":
                conclusion = self.triple()
            elif key == "witness":
                t = self.tok
                if t.text in self.scope.families and self.peek().text != "(":
                    self.advance()
                    witness = self.scope.families[t.text]
                else:
                    witness = self.relation()
            elif key == "children":
                self.expect("[")
                while not self.accept("]"):
                    children.append(self.node())
                    self.accept(",")
            else:
                raise self.error(f"unknown field {key!r}", "conclusion", "witness", "children")
            self.accept(";")
        if conclusion is None:
            raise self.error(f"rule {name} at line {start.line} has no conclusion")
        return Derivation(name, conclusion, tuple(children), witness)


def parse_script(text: str) -> ProofScript:
    return _ScriptParser(text).script()


def load_script(path: str | Path) -> ProofScript:
    return parse_script(Path(path).read_text(encoding="utf-8"))


# -- printing ---------------------------------------------------------------

def _families(d: Derivation) -> dict[str, A.Family]:
    found: dict[str, A.Family] = {}

    def rel(r: A.Relation) -> None:
        if isinstance(r, A.FamilyInstance):
            add(r.family)
            rel(r.family.body)
        elif isinstance(r, (A.Conj, A.Disj)):
            for a in r.args:
                rel(a)
        elif isinstance(r, A.Neg):
            rel(r.arg)
        elif isinstance(r, A.Implies):
            rel(r.left)
            rel(r.right)
        elif isinstance(r, (A.ExistsValue, A.FamilyExists)):
            rel(r.body)
        elif isinstance(r, (A.AssignPost, A.Flip)):
            rel(r.rel)

    def add(f: A.Family) -> None:
        old = found.get(f.name)
        if old is not None and old != f:
            raise ValueError(f"two different families named {f.name!r}")
        found[f.name] = f

    for _, node in d.nodes():
        rel(node.conclusion.pre)
        rel(node.conclusion.post)
        if isinstance(node.witness, A.Family):
            add(node.witness)
        elif isinstance(node.witness, A.Relation):
            rel(node.witness)
    return found


def _format_node(d: Derivation, depth: int) -> list[str]:
    pad = "  " * depth
    t = d.conclusion
    lines = [f"{pad}rule {d.rule} {{",
             f"{pad}  conclusion: < {t.pre} > {t.left} , {t.right} < {t.post} >;"]
    if isinstance(d.witness, A.Family):
        lines.append(f"{pad}  witness: {d.witness.name};")
    elif isinstance(d.witness, A.Relation):
        lines.append(f"{pad}  witness: {d.witness};")
    if d.children:
        lines.append(f"{pad}  children: [")
        for c in d.children:
            lines += _format_node(c, depth + 2)
        lines.append(f"{pad}  ]")
    lines.append(f"{pad}}}")
    return lines


def format_script(d: Derivation, domain: Optional[SearchDomain] = None) -> str:
    """Self-contained script text for ``d`` (relations written out in full)."""
    lines = []
    if domain is not None:
        entries = [f"{name} = {{{', '.join(map(str, vs))}}};" for name, vs in domain.values]
        entries += [f"fuel = {domain.fuel};", f"nmax = {domain.n_max};"]
        if domain.quantifier_values is not None:
            entries.append(f"qvals = {{{', '.join(map(str, domain.quantifier_values))}}};")
        lines.append("domain { " + " ".join(entries) + " }")
    for fam in _families(d).values():
        lines.append(A.format_family(fam))
    lines += _format_node(d, 0)
    return "\n".join(lines) + "\n"


_RANGE = re.compile(r"^(?:(?P<var>[A-Za-z_]\w*)=)?(?P<lo>-?\d+)\.\.(?P<hi>-?\d+)$")


def parse_range(text: str) -> tuple[Optional[str], list[int]]:
    """``VAR=LO..HI`` or ``LO..HI`` as used on the command line."""
    m = _RANGE.match(text.strip())
    if m is None:
        raise ValueError(f"bad range {text!r}; expected VAR=LO..HI or LO..HI")
    lo, hi = int(m["lo"]), int(m["hi"])
    if hi < lo:
        raise ValueError(f"empty range {text!r}")
    return m["var"], list(range(lo, hi + 1))


def script_vars(s: ProofScript) -> set[str]:
    out: set[str] = set()
    for _, node in s.derivation.nodes():
        t = node.conclusion
        out |= imp.command_vars(t.left) | imp.command_vars(t.right)
        out |= A.relation_vars(t.pre) | A.relation_vars(t.post)
    return out
