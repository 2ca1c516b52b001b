from ._core import (
    DivergenceError,
    Error,
    Lexicon,
    NoSupervisionError,
    Ontology,
    annotate,
    evaluate,
    resolve,
    synth,
    tokenize,
)

__all__ = [
    "DivergenceError",
    "Error",
    "Lexicon",
    "NoSupervisionError",
    "Ontology",
    "annotate",
    "evaluate",
    "resolve",
    "synth",
    "tokenize",
]
