"""Ordered labeled trees: bracketed parsing, truncation, and edit distance.

Grammar for the bracketed form (whitespace-tolerant, single root):

    tree := "(" label (" " tree)* ")" | label

Labels may not contain parentheses or whitespace.  The edit distance is the
Zhang-Shasha dynamic program over postorder keyroots with unit costs: insert
1, delete 1, relabel 1 when labels differ (0 otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormatError, ValidationError


@dataclass(frozen=True)
class ParseTree:
    """An ordered tree with a string label at every node."""

    label: str
    children: tuple["ParseTree", ...] = ()

    def __post_init__(self) -> None:
        if not self.label:
            raise ValidationError("tree node with empty label")

    def node_count(self) -> int:
        return 1 + sum(child.node_count() for child in self.children)

    def to_bracketed(self) -> str:
        if not self.children:
            return self.label
        inner = " ".join(child.to_bracketed() for child in self.children)
        return f"({self.label} {inner})"


def parse_bracketed(text: str) -> ParseTree:
    """Parse a single-root bracketed tree string."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    if not tokens:
        raise FormatError("empty tree string")
    pos = 0

    def parse_node() -> ParseTree:
        nonlocal pos
        if tokens[pos] == "(":
            pos += 1
            if pos >= len(tokens) or tokens[pos] in "()":
                raise FormatError("expected a label after '('")
            label = tokens[pos]
            pos += 1
            children: list[ParseTree] = []
            while pos < len(tokens) and tokens[pos] != ")":
                children.append(parse_node())
            if pos >= len(tokens):
                raise FormatError("unbalanced parentheses: missing ')'")
            pos += 1
            return ParseTree(label, tuple(children))
        if tokens[pos] == ")":
            raise FormatError("unexpected ')'")
        label = tokens[pos]
        pos += 1
        return ParseTree(label)

    tree = parse_node()
    if pos != len(tokens):
        raise FormatError("trailing content after the root tree")
    return tree


def truncate_tree(tree: ParseTree, max_level: int = 3) -> ParseTree:
    """Drop every node deeper than ``max_level`` (the root is level 1)."""
    if max_level < 1:
        raise ValidationError("max_level must be >= 1")
    if max_level == 1:
        return ParseTree(tree.label)
    return ParseTree(
        tree.label,
        tuple(truncate_tree(child, max_level - 1) for child in tree.children),
    )


# ---------------------------------------------------------------------------
# Zhang-Shasha tree edit distance
# ---------------------------------------------------------------------------


def _postorder(root: ParseTree) -> tuple[list[str], list[int], list[int]]:
    """Postorder labels, leftmost-leaf-descendant indices, and keyroots."""
    labels: list[str] = []
    lmds: list[int] = []

    def walk(node: ParseTree) -> int:
        first_leaf = -1
        for child in node.children:
            child_lmd = walk(child)
            if first_leaf == -1:
                first_leaf = child_lmd
        index = len(labels)
        lmd = index if first_leaf == -1 else first_leaf
        labels.append(node.label)
        lmds.append(lmd)
        return lmd

    walk(root)
    # keyroots: the highest node for every distinct leftmost leaf.
    highest: dict[int, int] = {}
    for index, lmd in enumerate(lmds):
        highest[lmd] = index
    keyroots = sorted(highest.values())
    return labels, lmds, keyroots


def tree_edit_distance(t1: ParseTree, t2: ParseTree) -> int:
    """Minimum number of unit-cost inserts, deletes and relabels."""
    labels1, lmds1, keyroots1 = _postorder(t1)
    labels2, lmds2, keyroots2 = _postorder(t2)
    n1, n2 = len(labels1), len(labels2)
    treedist = [[0] * n2 for _ in range(n1)]

    for i in keyroots1:
        for j in keyroots2:
            li, lj = lmds1[i], lmds2[j]
            rows = i - li + 2
            cols = j - lj + 2
            forest = [[0] * cols for _ in range(rows)]
            for x in range(1, rows):
                forest[x][0] = forest[x - 1][0] + 1
            for y in range(1, cols):
                forest[0][y] = forest[0][y - 1] + 1
            for x in range(1, rows):
                for y in range(1, cols):
                    node1 = li + x - 1
                    node2 = lj + y - 1
                    if lmds1[node1] == li and lmds2[node2] == lj:
                        relabel = 0 if labels1[node1] == labels2[node2] else 1
                        forest[x][y] = min(
                            forest[x - 1][y] + 1,
                            forest[x][y - 1] + 1,
                            forest[x - 1][y - 1] + relabel,
                        )
                        treedist[node1][node2] = forest[x][y]
                    else:
                        px = lmds1[node1] - li
                        py = lmds2[node2] - lj
                        forest[x][y] = min(
                            forest[x - 1][y] + 1,
                            forest[x][y - 1] + 1,
                            forest[px][py] + treedist[node1][node2],
                        )
    return treedist[n1 - 1][n2 - 1]
