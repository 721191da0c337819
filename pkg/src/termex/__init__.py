"""Retrieval-augmented in-context learning toolkit for automatic term extraction.

Ships demonstration retrieval over constituency parse trees (tree kernel and
tree edit distance), BM25 and embedding baselines, prompt assembly, an
OpenAI-compatible chat client, and the statistical evaluation stack
(micro P/R/F1, bootstrap confidence intervals, paired significance,
term overlap ratio, Spearman correlation).
"""

__version__ = "0.1.0"

from termex.treebank import ParseTree, parse_bracketed, serialize, unlexicalize

__all__ = [
    "ParseTree",
    "parse_bracketed",
    "serialize",
    "unlexicalize",
    "__version__",
]
