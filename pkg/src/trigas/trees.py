"""Tree encoding of a contour extracted from its coarsening history.

Every contour maps to a finite rooted tree with three node kinds:

  * white nodes carry one triangle plus the spheres (sub-contours) nested
    inside its basis; they come from squares already present at time 0;
  * black nodes are squares formed by a fusion; their offspring are the
    endpoints of the maximal-shadow arrows of that fusion (recursively
    expanded) with the swallowed squares recorded as spheres sitting in the
    gaps between consecutive offspring;
  * sphere leaves carry a whole sub-contour and only expose its mass and
    span.

The encoding is what makes contour counting tractable: the number of trees
with total mass m grows at most geometrically once each sphere is charged
the cube of its mass for its position, which is exactly the constraint
validate_tree_constraints enforces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .contours import DEFAULT_C, decompose
from .squares import InternalConsistencyError, SquareProcessTrace
from .triangles import Triangle, TriangleConfiguration


@dataclass(frozen=True)
class SphereNode:
    """An unexpanded sub-contour; only its footprint matters to the tree."""

    members: tuple[Triangle, ...]

    def __init__(self, members):
        mem = tuple(sorted(members, key=lambda t: (t.lo, t.hi)))
        if not mem:
            raise ValueError("a sphere carries at least one triangle")
        object.__setattr__(self, "members", mem)

    @property
    def mass(self) -> int:
        return sum(t.mass for t in self.members)

    @property
    def span(self) -> tuple[int, int]:
        return (self.members[0].lo, max(t.hi for t in self.members))


@dataclass(frozen=True)
class WhiteNode:
    triangle: Triangle
    spheres: tuple[SphereNode, ...]
    members: tuple[Triangle, ...]

    @property
    def mass(self) -> int:
        return sum(t.mass for t in self.members)

    @property
    def own_mass(self) -> int:
        return self.triangle.mass

    @property
    def span(self) -> tuple[int, int]:
        return (self.triangle.lo, self.triangle.hi)


@dataclass(frozen=True)
class BlackNode:
    children: tuple["TreeNode", ...]
    gap_spheres: tuple[tuple[SphereNode, ...], ...]
    members: tuple[Triangle, ...]

    @property
    def mass(self) -> int:
        return sum(t.mass for t in self.members)

    @property
    def span(self) -> tuple[int, int]:
        return (
            min(t.lo for t in self.members),
            max(t.hi for t in self.members),
        )


TreeNode = Union[WhiteNode, BlackNode]


@dataclass(frozen=True)
class ContourTree:
    root: TreeNode

    @property
    def root_is_white(self) -> bool:
        return isinstance(self.root, WhiteNode)

    @property
    def mass(self) -> int:
        return self.root.mass

    def node_count(self) -> int:
        def walk(node: TreeNode) -> int:
            if isinstance(node, WhiteNode):
                return 1 + len(node.spheres)
            return 1 + sum(walk(ch) for ch in node.children) + sum(
                len(g) for g in node.gap_spheres
            )

        return walk(self.root)


def extract_tree(
    trace: SquareProcessTrace, tris: TriangleConfiguration | None = None
) -> ContourTree:
    """Read the tree off a finished coarsening trace.

    When tris is given it is checked against the triangles the trace
    actually processed.
    """
    if tris is not None:
        seen = tuple(
            sorted(
                (t for sq in trace.configs[0] for t in sq.members),
                key=lambda t: (t.lo, t.hi),
            )
        )
        if seen != tris.triangles:
            raise ValueError("trace does not belong to this configuration")

    def build(square) -> TreeNode:
        born = trace.first_seen(square)
        if born == 0:
            own = Triangle(square.lo, square.hi)
            if own not in square.members:
                raise InternalConsistencyError(
                    "time-0 square does not sit on a triangle of its own size"
                )
            rest = [t for t in square.members if t != own]
            spheres = tuple(
                SphereNode(g.triangles)
                for g in decompose(TriangleConfiguration(rest), trace.c)
            )
            return WhiteNode(triangle=own, spheres=spheres, members=square.members)
        out = trace.steps[born - 1]
        idx = out.squares_after.index(square)
        group = out.merged_groups[idx]
        prev = trace.configs[born - 1]
        prim = sorted(
            (i for i in group if i in out.primary_squares),
            key=lambda i: prev[i].lo,
        )
        stray = [
            i
            for i in group
            if i not in out.primary_squares and i not in out.secondary_squares
        ]
        if len(prim) < 2:
            raise InternalConsistencyError("a fusion produced fewer than two anchors")
        if stray:
            raise InternalConsistencyError(
                "a fused square is neither an anchor nor inside a maximal shadow"
            )
        children = tuple(build(prev[i]) for i in prim)
        gaps: list[list[SphereNode]] = [[] for _ in range(len(prim) - 1)]
        for i in group:
            if i not in out.secondary_squares:
                continue
            s = prev[i]
            slots = [
                k
                for k in range(len(prim) - 1)
                if prev[prim[k]].hi < s.lo and s.hi < prev[prim[k + 1]].lo
            ]
            if len(slots) != 1:
                raise InternalConsistencyError(
                    "swallowed square does not sit between two consecutive anchors"
                )
            gaps[slots[0]].append(SphereNode(members=s.members))
        gap_spheres = tuple(
            tuple(sorted(g, key=lambda sn: sn.span[0])) for g in gaps
        )
        return BlackNode(
            children=children, gap_spheres=gap_spheres, members=square.members
        )

    return ContourTree(root=build(trace.final))


def _chain_ok(a: int, b: int, spheres: tuple[SphereNode, ...], c: float) -> bool:
    """Spheres between anchors a and b must split into a left-anchored and a
    right-anchored chain, each link within c * (own mass)^3 + 1 of the
    previous object."""
    k = len(spheres)
    if k == 0:
        return True
    lefts = [s.span[0] for s in spheres]
    rights = [s.span[1] for s in spheres]
    caps = [c * s.mass ** 3 + 1 for s in spheres]
    for p in range(k + 1):
        ok = True
        prev = a
        for j in range(p):
            gap = lefts[j] - prev
            if not 0 <= gap <= caps[j]:
                ok = False
                break
            prev = rights[j]
        if ok:
            nxt = b
            for j in range(k - 1, p - 1, -1):
                gap = nxt - rights[j]
                if not 0 <= gap <= caps[j]:
                    ok = False
                    break
                nxt = lefts[j]
        if ok:
            return True
    return False


@dataclass(frozen=True)
class TreeReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_tree_constraints(tree: ContourTree, c: float = DEFAULT_C) -> TreeReport:
    """Check every structural constraint the counting argument charges for.

    Black nodes need at least two offspring, exact mass bookkeeping, ordered
    disjoint offspring with consecutive hulls within c * min(mass)^3, and
    two-sided sphere chains in every gap.  White nodes need their spheres
    nested inside the triangle with the same chain condition anchored just
    inside the basis.
    """
    violations: list[str] = []

    def note(msg: str) -> None:
        violations.append(msg)

    def walk(node: TreeNode, path: str) -> None:
        if isinstance(node, WhiteNode):
            booked = sorted(
                (node.triangle, *(t for s in node.spheres for t in s.members)),
                key=lambda t: (t.lo, t.hi),
            )
            if tuple(booked) != node.members:
                note(f"{path}: white node loses or invents triangles")
            for s in node.spheres:
                if not (node.triangle.lo < s.span[0] and s.span[1] < node.triangle.hi):
                    note(f"{path}: sphere {s.span} pokes out of triangle basis")
            if not _chain_ok(
                node.triangle.lo + 1, node.triangle.hi - 1, node.spheres, c
            ):
                note(f"{path}: white sphere chain breaks the reach bound")
            return
        if len(node.children) < 2:
            note(f"{path}: black node with fewer than two offspring")
        child_tris = [t for ch in node.children for t in ch.members]
        gap_tris = [t for g in node.gap_spheres for s in g for t in s.members]
        booked = sorted(child_tris + gap_tris, key=lambda t: (t.lo, t.hi))
        if tuple(booked) != node.members:
            note(f"{path}: black node mass bookkeeping fails")
        if len(node.gap_spheres) != max(len(node.children) - 1, 0):
            note(f"{path}: gap count does not match offspring count")
        for k in range(len(node.children) - 1):
            left = node.children[k]
            right = node.children[k + 1]
            if not left.span[1] < right.span[0]:
                note(f"{path}: offspring {k} and {k + 1} out of order")
                continue
            gap = right.span[0] - left.span[1] - 1
            cap = c * min(left.mass, right.mass) ** 3
            if gap > cap:
                note(
                    f"{path}: offspring {k} and {k + 1} are {gap} apart, "
                    f"beyond {cap:.0f}"
                )
            if k < len(node.gap_spheres):
                a, b = left.span[1], right.span[0]
                for s in node.gap_spheres[k]:
                    if not (a < s.span[0] and s.span[1] < b):
                        note(f"{path}: sphere {s.span} outside gap {k}")
                if not _chain_ok(a, b, node.gap_spheres[k], c):
                    note(f"{path}: gap {k} sphere chain breaks the reach bound")
        for k, ch in enumerate(node.children):
            walk(ch, f"{path}.{k}")

    walk(tree.root, "root")
    return TreeReport(violations=tuple(violations))


def tree_to_record(tree: ContourTree) -> dict:
    """JSON-ready nested record; see docs/tree-format.md for the contract."""

    def sphere_rec(s: SphereNode) -> dict:
        return {
            "kind": "sphere",
            "mass": s.mass,
            "span": list(s.span),
            "triangles": [[t.lo, t.hi] for t in s.members],
        }

    def rec(node: TreeNode) -> dict:
        if isinstance(node, WhiteNode):
            return {
                "kind": "white",
                "mass": node.mass,
                "triangle": [node.triangle.lo, node.triangle.hi],
                "spheres": [sphere_rec(s) for s in node.spheres],
            }
        return {
            "kind": "black",
            "mass": node.mass,
            "span": list(node.span),
            "children": [rec(ch) for ch in node.children],
            "gaps": [[sphere_rec(s) for s in g] for g in node.gap_spheres],
        }

    return rec(tree.root)
