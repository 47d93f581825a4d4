from typing import Optional

import attr

from src.fixpoint import GroundAtom, Interpretation, unify
from src.frontend.schema import Database
from src.frontend.syntax import Atom
from src.solver.grounding import CellDecl, GroundModel
from src.solver.search import Solution
from src.transpile.model import ConstraintModel, IntArray
from src.utils import Value


@attr.s(frozen=True, hash=False)
class Codebook:
    """
    What is needed to read a solution back as relations: the ground cells, the domain whose codes index each array
    dimension reindexed by array reduction, and the label domain of each integer array.
    """

    cells: tuple[CellDecl, ...] = attr.ib(converter=tuple)
    dimensions: dict[str, tuple[Optional[str], ...]] = attr.ib()
    labels: dict[str, str] = attr.ib()
    extents: dict[str, tuple[Value, ...]] = attr.ib()

    @classmethod
    def from_model(cls, model: ConstraintModel, ground: GroundModel, db: Database) -> "Codebook":
        ranges = model.ranges()
        dimensions = {}
        labels = {}
        for decl in model.decision_arrays():
            dimensions[decl.name] = tuple(
                ranges[domain].domain if domain in ranges else None for domain in decl.domains
            )
            if isinstance(decl, IntArray):
                labels[decl.name] = ranges[decl.values].domain
        return cls(
            cells=ground.cells,
            dimensions=dimensions,
            labels=labels,
            extents=db.with_domains(model.schema).extents,
        )

    def decode_code(self, domain: str, code: Value) -> Value:
        assert isinstance(code, int)
        return self.extents[domain][code - 1]

    def decode_cell(self, cell: CellDecl, value: int) -> Optional[GroundAtom]:
        """
        The atom a cell stands for under `value`, or None when the cell makes nothing true.
        """

        indices = tuple(
            index if domain is None else self.decode_code(domain, index)
            for index, domain in zip(cell.indices, self.dimensions.get(cell.array, ()))
        )
        if cell.array in self.labels:
            if value == 0:
                return None
            return cell.array, indices + (self.extents[self.labels[cell.array]][value - 1],)
        return (cell.array, indices) if value else None

    def decode(self, solution: Solution) -> Interpretation:
        atoms = [self.decode_cell(cell, value) for cell, value in zip(self.cells, solution.assignment)]
        interpretation = Interpretation.from_atoms(atom for atom in atoms if atom is not None)
        return interpretation.union(Interpretation(relations={array: frozenset() for array in self.dimensions}))


def extract_answer(solution: Solution, goal: Atom, codebook: Codebook) -> frozenset[tuple[Value, ...]]:
    """
    The tuples of the goal relation in `solution` that match the arguments of `goal`.
    """

    relation = codebook.decode(solution).relation(goal.predicate)
    return frozenset(values for values in relation if unify(goal, values, {}) is not None)
