from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from models.patterns import Certificate, PatternKind
from models.tree import TreeShape


class SearchStatus(str, Enum):
    FOUND = 'found'
    NONE = 'none'
    UNKNOWN = 'unknown'


@dataclass(frozen=True)
class SearchSpec:
    """
    What to look for and how much effort to spend.

    Attributes
    ----------
    kind : PatternKind
        Pattern kind, with ``params`` as in certificates.
    params : dict
        Kind parameters.
    shape : TreeShape or None
        Tree shape for tree kinds.
    dims : tuple of int or None
        ``(rows, cols)`` for array kinds.
    family : tuple of str or None
        Names of the candidate sets; all sets of the system when None.
    budget_assignments : int or None
        Maximum partial assignments explored (with pruning) or full
        assignment space size (without).
    deadline_seconds : float or None
        Wall-clock limit; hitting it yields an ``unknown`` outcome.
    prune : bool
        Check constraints on partial assignments.
    threads : int or None
        Workers partitioning the first slot's candidates.
    """

    kind: PatternKind
    params: dict[str, Any] = field(default_factory=dict)
    shape: TreeShape | None = None
    dims: tuple[int, int] | None = None
    family: tuple[str, ...] | None = None
    budget_assignments: int | None = None
    deadline_seconds: float | None = None
    prune: bool = True
    threads: int | None = None


@dataclass(frozen=True)
class SearchOutcome:
    """
    Result of a search.

    ``none`` is only reported after the whole space was covered; a deadline
    gives ``unknown``.
    """

    status: SearchStatus
    certificate: Certificate | None = None
    space_size: int = 0
    explored: int = 0
    assignment: tuple[int, ...] | None = None
