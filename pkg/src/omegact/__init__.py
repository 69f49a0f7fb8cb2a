"""Toolkit for action logic with omega iteration.

Modules:
    syntax    -- two-sorted formula/sequent ASTs, parser, printer
    wordsem   -- derivative-based word membership (automata-free oracle)
    automata  -- NFA and Buchi engines: constructions, complementation,
                 inclusion, lasso membership
    kernel    -- proof-certificate representation and checking
    certio    -- text format for certificates
    prover    -- decision procedure, certificate generation, backward search
    grammars  -- context-free grammars, GNF, type lexicons, totality sequents
    cli       -- command-line interface
"""

from .syntax import (
    Formula,
    Join,
    LassoWord,
    Meet,
    Omega,
    Over,
    ParseError,
    Prod,
    Sequent,
    Sort,
    SortError,
    Star,
    Under,
    UpSequence,
    Var,
    normalize_up,
    parse_formula,
    parse_sequent,
    print_formula,
    print_sequent,
    seq1,
    seq2,
    seq3,
    up_index,
)

__all__ = [
    "Formula",
    "Var",
    "Prod",
    "Under",
    "Over",
    "Join",
    "Meet",
    "Star",
    "Omega",
    "Sort",
    "SortError",
    "ParseError",
    "UpSequence",
    "LassoWord",
    "Sequent",
    "seq1",
    "seq2",
    "seq3",
    "normalize_up",
    "up_index",
    "parse_formula",
    "parse_sequent",
    "print_formula",
    "print_sequent",
]
