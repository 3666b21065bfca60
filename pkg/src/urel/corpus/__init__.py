"""Bundled example programs (``programs/*.imp``) and proofs (``proofs/*.proof``)."""
from __future__ import annotations

from pathlib import Path

from ..imp import Command
from ..parse import parse_command

ROOT = Path(__file__).resolve().parent


def corpus_path(name: str) -> Path:
    """``fig3_left.imp`` or ``fig3_left.proof`` resolved inside the corpus."""
    sub = "proofs" if name.endswith(".proof") else "programs"
    path = ROOT / sub / name
    if not path.is_file():
        raise FileNotFoundError(f"no corpus file {name!r}")
    return path


def load_program(name: str) -> Command:
    if not name.endswith(".imp"):
        name += ".imp"
    return parse_command(corpus_path(name).read_text(encoding="utf-8"))
