"""Penn-Treebank bracket trees: parsing, validation, and unlexicalization.

Trees are produced by an external constituency parser and ingested here in
bracket notation.  All syntactic similarity computations operate on the
unlexicalized form (surface tokens removed, POS preterminals as leaves).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

__all__ = [
    "ParseTree",
    "TreebankError",
    "UnbalancedBrackets",
    "EmptyNode",
    "NodeWithoutLabel",
    "MixedContent",
    "DuplicateId",
    "TreebankLoadError",
    "parse_bracketed",
    "serialize",
    "unlexicalize",
    "strip_functional_labels",
    "drop_punctuation",
    "load_treebank",
]


class TreebankError(ValueError):
    """Base class for bracket-notation parse failures."""


class UnbalancedBrackets(TreebankError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EmptyNode(TreebankError):
    """A bare `()` with no label and no children."""


class NodeWithoutLabel(TreebankError):
    """A node whose first element is a subtree instead of a label."""


class MixedContent(TreebankError):
    """A node mixing surface tokens and subtree children."""


class DuplicateId(TreebankError):
    """The same sentence id appears more than once in a treebank file."""


class TreebankLoadError(TreebankError):
    """Aggregated per-line failures from a treebank file."""

    def __init__(self, errors: list[tuple[int, str]]):
        lines = "; ".join(f"line {n}: {msg}" for n, msg in errors)
        super().__init__(f"{len(errors)} bad line(s): {lines}")
        self.errors = errors


# Default POS tags treated as punctuation preterminals by drop_punctuation.
PUNCTUATION_LABELS = frozenset({".", ",", ":", "``", "''", "-LRB-", "-RRB-"})

_FORBIDDEN_LABEL_CHARS = set("() \t\n\r\f\v")


@dataclass(frozen=True)
class ParseTree:
    """Rooted ordered labeled tree for one sentence.

    ``node_id`` is the preorder index within the whole tree, assigned at
    construction; ``token`` carries the surface form on preterminal leaves
    and is None after unlexicalization.
    """

    label: str
    children: tuple["ParseTree", ...] = ()
    node_id: int = 0
    token: Optional[str] = None

    def __post_init__(self):
        if not self.label:
            raise NodeWithoutLabel("node label must be non-empty")
        if any(c in _FORBIDDEN_LABEL_CHARS for c in self.label):
            raise NodeWithoutLabel(
                f"label {self.label!r} contains whitespace or brackets"
            )

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def iter_nodes(self) -> Iterator["ParseTree"]:
        """Preorder traversal; node_ids are contiguous along this order."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def size(self) -> int:
        return sum(1 for _ in self.iter_nodes())

    def structurally_equal(self, other: "ParseTree") -> bool:
        """Label-and-shape equality, ignoring node_ids and tokens."""
        if self.label != other.label or len(self.children) != len(other.children):
            return False
        return all(
            a.structurally_equal(b) for a, b in zip(self.children, other.children)
        )


def _renumber(label: str, children: tuple, token, counter: list[int]) -> ParseTree:
    node_id = counter[0]
    counter[0] += 1
    new_children = tuple(
        _renumber(c.label, c.children, c.token, counter) for c in children
    )
    return ParseTree(label=label, children=new_children, node_id=node_id, token=token)


def _rebuild(label: str, children: list, token: Optional[str]) -> ParseTree:
    """Construct a tree from loose parts, assigning fresh preorder ids."""
    proto = ParseTree(label=label, children=tuple(children), token=token)
    return _renumber(proto.label, proto.children, proto.token, [0])


_WRAPPER_LABEL = "ROOT"


def parse_bracketed(text: str) -> ParseTree:
    """Parse one balanced PTB bracket expression.

    Surface tokens stay attached as leaf payloads.  A single-child
    ``(ROOT ...)`` wrapper is stripped.  Raises UnbalancedBrackets,
    EmptyNode, NodeWithoutLabel, or MixedContent on malformed input.
    """
    # Each stack frame is a list of parts: first the label atom, then
    # child trees or token atoms.
    stack: list[list] = []
    root: Optional[ParseTree] = None
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            if root is not None:
                raise UnbalancedBrackets("content after complete tree", i)
            stack.append([])
            i += 1
        elif ch == ")":
            if not stack:
                raise UnbalancedBrackets("unmatched ')'", i)
            parts = stack.pop()
            node = _close_node(parts, i)
            if stack:
                stack[-1].append(node)
            else:
                root = node
            i += 1
        else:
            j = i
            while j < n and text[j] not in "() \t\n\r\f\v":
                j += 1
            atom = text[i:j]
            if not stack:
                raise UnbalancedBrackets("token outside brackets", i)
            stack[-1].append(atom)
            i = j
    if stack:
        raise UnbalancedBrackets("unclosed '('", n)
    if root is None:
        raise UnbalancedBrackets("no tree found", 0)
    if root.label == _WRAPPER_LABEL and len(root.children) == 1:
        root = root.children[0]
    return _rebuild(root.label, list(root.children), root.token)


def _close_node(parts: list, position: int) -> ParseTree:
    if not parts:
        raise EmptyNode(f"empty node '()' at position {position}")
    head = parts[0]
    if isinstance(head, ParseTree):
        raise NodeWithoutLabel(f"node starting with a subtree at position {position}")
    rest = parts[1:]
    atoms = [p for p in rest if isinstance(p, str)]
    subtrees = [p for p in rest if isinstance(p, ParseTree)]
    if atoms and subtrees:
        raise MixedContent(
            f"node {head!r} mixes tokens and subtrees at position {position}"
        )
    if atoms:
        return ParseTree(label=head, token=" ".join(atoms))
    return ParseTree(label=head, children=tuple(subtrees))


def serialize(tree: ParseTree) -> str:
    """Canonical form: ``(LABEL child1 child2 ...)`` with single spaces."""
    if tree.is_leaf:
        if tree.token is not None:
            return f"({tree.label} {tree.token})"
        return f"({tree.label})"
    inner = " ".join(serialize(c) for c in tree.children)
    return f"({tree.label} {inner})"


def unlexicalize(tree: ParseTree) -> ParseTree:
    """Drop surface-token payloads; topology and labels are unchanged."""

    def strip(node: ParseTree) -> ParseTree:
        return ParseTree(
            label=node.label,
            children=tuple(strip(c) for c in node.children),
            node_id=node.node_id,
            token=None,
        )

    return strip(tree)


def strip_functional_labels(tree: ParseTree) -> ParseTree:
    """Remove functional-tag suffixes (``NP-SBJ`` -> ``NP``).

    Labels that start with '-' (e.g. ``-NONE-``, ``-LRB-``) are left alone.
    """

    def strip_label(label: str) -> str:
        if label.startswith("-"):
            return label
        return label.split("-", 1)[0]

    def walk(node: ParseTree) -> ParseTree:
        return ParseTree(
            label=strip_label(node.label),
            children=tuple(walk(c) for c in node.children),
            node_id=node.node_id,
            token=node.token,
        )

    return walk(tree)


def drop_punctuation(
    tree: ParseTree, labels: frozenset[str] = PUNCTUATION_LABELS
) -> ParseTree:
    """Remove punctuation preterminals, pruning nodes left childless.

    Raises TreebankError if the whole tree is punctuation.
    """

    def walk(node: ParseTree) -> Optional[ParseTree]:
        if node.is_leaf:
            return None if node.label in labels else node
        kept = [w for w in (walk(c) for c in node.children) if w is not None]
        if not kept:
            return None
        return ParseTree(label=node.label, children=tuple(kept), token=node.token)

    pruned = walk(tree)
    if pruned is None:
        raise TreebankError("tree is empty after punctuation removal")
    return _rebuild(pruned.label, list(pruned.children), pruned.token)


def load_treebank(
    path,
    *,
    strip_functional: bool = False,
    remove_punctuation: bool = False,
) -> dict[str, ParseTree]:
    """Read ``<id>\\t<bracket string>`` lines into id -> unlexicalized tree.

    Duplicate ids and per-line parse failures are aggregated into a
    TreebankLoadError carrying line numbers.
    """
    trees: dict[str, ParseTree] = {}
    errors: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                errors.append((lineno, "missing tab separator"))
                continue
            sent_id, bracket = line.split("\t", 1)
            if sent_id in trees:
                errors.append((lineno, f"duplicate id {sent_id!r}"))
                continue
            try:
                tree = unlexicalize(parse_bracketed(bracket))
                if strip_functional:
                    tree = strip_functional_labels(tree)
                if remove_punctuation:
                    tree = drop_punctuation(tree)
            except TreebankError as exc:
                errors.append((lineno, str(exc)))
                continue
            trees[sent_id] = tree
    if errors:
        if any("duplicate id" in msg for _, msg in errors):
            raise DuplicateId(
                "; ".join(f"line {n}: {m}" for n, m in errors)
            )
        raise TreebankLoadError(errors)
    return trees
