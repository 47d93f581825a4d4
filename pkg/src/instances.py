"""
Small deterministic databases for the corpus programs: graphs over the domain `node` with the relation `edge`,
optionally a `color` domain, and integer ranges over `num`.
"""

import random
from typing import Optional

import attr

from src.constants import InstanceFamilies
from src.exc import Diagnostic, ValidationException
from src.frontend.schema import Database
from src.utils import Value

Edges = set[tuple[Value, Value]]


@attr.s(frozen=True)
class InstanceParams:
    size: int = attr.ib()
    probability: Optional[float] = attr.ib(default=None)
    seed: Optional[int] = attr.ib(default=None)
    colors: Optional[int] = attr.ib(default=None)

    def validate(self, family: InstanceFamilies) -> None:
        diagnostics = []
        if self.size < 1:
            diagnostics.append(Diagnostic(f"The size must be positive, got {self.size}"))
        if self.colors is not None and self.colors < 1:
            diagnostics.append(Diagnostic(f"The number of colors must be positive, got {self.colors}"))
        if family == InstanceFamilies.random_gnp:
            if self.probability is None or not 0 <= self.probability <= 1:
                diagnostics.append(Diagnostic(f"The edge probability must be in [0, 1], got {self.probability}"))
            if self.seed is None:
                diagnostics.append(Diagnostic("A seed is required for random graphs"))
        if diagnostics:
            raise ValidationException(diagnostics)


def node_names(count: int) -> tuple[str, ...]:
    return tuple(f"n{index}" for index in range(1, count + 1))


def symmetric(edges: Edges) -> Edges:
    return edges | {(target, source) for source, target in edges}


# region families


def chain_edges(nodes: tuple[str, ...]) -> Edges:
    return {(nodes[index], nodes[index + 1]) for index in range(len(nodes) - 1)}


def cycle_edges(nodes: tuple[str, ...]) -> Edges:
    if len(nodes) < 2:
        return set()
    return chain_edges(nodes) | {(nodes[-1], nodes[0])}


def complete_edges(nodes: tuple[str, ...]) -> Edges:
    return {(source, target) for source in nodes for target in nodes if source != target}


def ladder_edges(nodes: tuple[str, ...]) -> Edges:
    """
    Two rails of equal length joined by rungs; `nodes` holds the first rail followed by the second.
    """

    length = len(nodes) // 2
    top, bottom = nodes[:length], nodes[length:]
    return symmetric(chain_edges(top) | chain_edges(bottom) | set(zip(top, bottom)))


def gnp_edges(nodes: tuple[str, ...], probability: float, seed: int) -> Edges:
    generator = random.Random(seed)
    edges = set()
    for index, source in enumerate(nodes):
        for target in nodes[index + 1 :]:
            if generator.random() < probability:
                edges.add((source, target))
    return symmetric(edges)


# endregion


def gen_instance(family: InstanceFamilies, params: InstanceParams) -> Database:
    """
    `chain` and `cycle` are directed; `complete`, `grid-ladder` and `random-gnp` store every undirected edge as a
    symmetric pair. A grid ladder of size n has 2n nodes. `numbers` yields the integers 1..n as the domain `num`.
    """

    params.validate(family)
    extents: dict[str, tuple[Value, ...]] = {}
    facts: dict[str, frozenset[tuple[Value, ...]]] = {}
    if family == InstanceFamilies.numbers:
        extents["num"] = tuple(range(1, params.size + 1))
    else:
        count = 2 * params.size if family == InstanceFamilies.grid_ladder else params.size
        nodes = node_names(count)
        if family == InstanceFamilies.chain:
            edges = chain_edges(nodes)
        elif family == InstanceFamilies.cycle:
            edges = cycle_edges(nodes)
        elif family == InstanceFamilies.complete:
            edges = complete_edges(nodes)
        elif family == InstanceFamilies.grid_ladder:
            edges = ladder_edges(nodes)
        else:
            assert params.probability is not None and params.seed is not None
            edges = gnp_edges(nodes, params.probability, params.seed)
        extents["node"] = nodes
        facts["edge"] = frozenset(edges)
    if params.colors is not None:
        extents["color"] = tuple(f"c{index}" for index in range(1, params.colors + 1))
    return Database(extents=extents, facts=facts)
