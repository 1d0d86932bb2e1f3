from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any, Mapping, Sequence

from core.exceptions import MalformedPayloadError, ValidationError
from models.tree import Node, TreeShape, node_to_str

Label = frozenset[int]


@dataclass(frozen=True)
class SetSystem:
    """
    A finite domain ``{0, ..., domain_size-1}`` with named subsets.

    The insertion order of ``sets`` is the family order used by searches.

    Examples
    --------
    >>> system = SetSystem(2, {'a': frozenset({0}), 'b': frozenset({1})})
    >>> system.family()
    [frozenset({0}), frozenset({1})]
    """

    domain_size: int
    sets: Mapping[str, Label]

    def __post_init__(self):
        if self.domain_size < 0:
            raise ValidationError({'domain_size': 'Domain size must be non-negative'})
        for name, members in self.sets.items():
            if any(x < 0 or x >= self.domain_size for x in members):
                raise ValidationError({'sets': f"Set '{name}' leaves the domain of size {self.domain_size}"})

    @property
    def domain(self) -> Label:
        return frozenset(range(self.domain_size))

    def names(self) -> list[str]:
        return list(self.sets)

    def family(self, names: Sequence[str] | None = None) -> list[Label]:
        """Sets in family order, optionally restricted to ``names``."""
        if names is None:
            return list(self.sets.values())
        missing = [name for name in names if name not in self.sets]
        if missing:
            raise ValidationError({'family': f'Unknown set names {missing}'})
        return [self.sets[name] for name in names]


@dataclass(frozen=True)
class LabeledTree:
    """
    Subsets of a finite domain attached to the nodes of a shape.

    Only nodes of level at least 1 carry labels; the root stands for the
    whole domain.

    Attributes
    ----------
    shape : TreeShape
        The index shape.
    domain_size : int
        Size of the domain ``{0, ..., domain_size-1}``.
    labels : Mapping[Node, frozenset of int]
        Total on ``shape.labeled_nodes``.
    """

    shape: TreeShape
    domain_size: int
    labels: Mapping[Node, Label] = field(repr=False)

    def __post_init__(self):
        expected = set(self.shape.labeled_nodes)
        given = set(self.labels)
        if given != expected:
            missing = sorted(expected - given)[:3]
            extra = sorted(given - expected)[:3]
            raise MalformedPayloadError(
                f'Labels must cover exactly the non-root nodes of {self.shape}; '
                f'missing {[node_to_str(n) for n in missing]}, extra {[node_to_str(n) for n in extra]}'
            )
        for node, label in self.labels.items():
            if any(x < 0 or x >= self.domain_size for x in label):
                raise MalformedPayloadError(f'Label of {node_to_str(node)} leaves the domain of size {self.domain_size}')

    @property
    def domain(self) -> Label:
        return frozenset(range(self.domain_size))

    def label(self, node: Node) -> Label:
        if not node:
            return self.domain
        return self.labels[node]

    @cached_property
    def path_intersections(self) -> dict[Node, Label]:
        """Intersection of the labels from the root down to each node."""
        result: dict[Node, Label] = {(): self.domain} if self.shape.depth else {}
        for node in self.shape.labeled_nodes:
            result[node] = result[node[:-1]] & self.labels[node]
        return result

    def with_labels(self, labels: Mapping[Node, Label]) -> 'LabeledTree':
        return LabeledTree(self.shape, self.domain_size, dict(labels))


@dataclass(frozen=True)
class TupleLabeledTree:
    """A tree whose labels are ordered tuples of source labels."""

    shape: TreeShape
    domain_size: int
    labels: Mapping[Node, tuple[Label, ...]] = field(repr=False)


@dataclass(frozen=True)
class InpArray:
    """
    An array of subsets: ``cells[i][j]`` sits in row i, column j.

    Attributes
    ----------
    rows : int
        Number of rows.
    cols : int
        Number of columns.
    domain_size : int
        Size of the domain.
    cells : tuple of tuple of frozenset
        The ``rows x cols`` matrix.
    """

    rows: int
    cols: int
    domain_size: int
    cells: tuple[tuple[Label, ...], ...] = field(repr=False)

    def __post_init__(self):
        if len(self.cells) != self.rows or any(len(row) != self.cols for row in self.cells):
            raise MalformedPayloadError(f'Cells must form a {self.rows}x{self.cols} matrix')
        for i, row in enumerate(self.cells):
            for j, cell in enumerate(row):
                if any(x < 0 or x >= self.domain_size for x in cell):
                    raise MalformedPayloadError(f'Cell ({i}, {j}) leaves the domain of size {self.domain_size}')

    @property
    def domain(self) -> Label:
        return frozenset(range(self.domain_size))

    def cell(self, i: int, j: int) -> Label:
        return self.cells[i][j]

    def row(self, i: int) -> tuple[Label, ...]:
        return self.cells[i]


class PatternKind(str, Enum):
    """
    Pattern kinds and the parameter each one takes.

    ``k`` is a single inconsistency bound, ``n`` the uniform bound of
    ``CDT_N`` and ``bounds`` a per-level (or per-row) list.
    """

    TP = 'TP'
    TP1 = 'TP1'
    TP2 = 'TP2'
    SOP1 = 'SOP1'
    SOP2 = 'SOP2'
    KTP1 = 'kTP1'
    WEAK_KTP1 = 'weakKTP1'
    CDT = 'CDT'
    CDT_N = 'CDT_N'
    CDT_LEVEL = 'CDT_LEVEL'
    SCT = 'SCT'
    SCT_K = 'SCT_K'
    INP = 'INP'

    @classmethod
    def parse(cls, text: str) -> 'PatternKind':
        wanted = text.replace('-', '').replace('_', '').lower()
        for kind in cls:
            if kind.value.replace('_', '').lower() == wanted:
                return kind
        raise ValidationError({'kind': f"Unknown pattern kind '{text}'"})

    @property
    def uses_array(self) -> bool:
        return self in (PatternKind.TP2, PatternKind.INP)

    @property
    def needs_binary(self) -> bool:
        return self in (PatternKind.SOP1, PatternKind.SOP2)

    @property
    def param_name(self) -> str | None:
        if self in (PatternKind.CDT, PatternKind.INP):
            return 'bounds'
        if self is PatternKind.CDT_N:
            return 'n'
        if self in (PatternKind.TP, PatternKind.TP2, PatternKind.KTP1, PatternKind.WEAK_KTP1,
                    PatternKind.CDT_LEVEL, PatternKind.SCT_K):
            return 'k'
        return None


@dataclass(frozen=True)
class Violation:
    """
    One failing configuration.

    Attributes
    ----------
    rule : str
        ``path``, ``siblings``, ``level``, ``incomparable``, ``antichain``,
        ``distant-siblings``, ``sop1``, ``row`` or ``transversal``.
    nodes : tuple of Node
        The offending tree nodes (a path is given by its maximal node).
    cells : tuple of (int, int)
        The offending array cells.
    """

    rule: str
    nodes: tuple[Node, ...] = ()
    cells: tuple[tuple[int, int], ...] = ()

    def describe(self) -> str:
        if self.cells:
            return f"{self.rule}: {', '.join(f'({i},{j})' for i, j in self.cells)}"
        return f"{self.rule}: {', '.join(node_to_str(n) for n in self.nodes)}"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violations: tuple[Violation, ...] = ()
    truncated: bool = False


@dataclass(frozen=True)
class Provenance:
    """
    How a certificate was produced by a transform.

    Attributes
    ----------
    transform : str
        Transform name.
    case_fired : str or None
        Which branch of a case split produced the output.
    minimal_k : int or None
        The minimal bound found, when the transform searches for one.
    n_levels : int or None
        Number of levels merged by a stretch (the ``N`` of the stage).
    ops_applied : tuple of dict
        References of the node maps applied, in order.
    notes : dict
        Transform-specific report entries.
    """

    transform: str
    case_fired: str | None = None
    minimal_k: int | None = None
    n_levels: int | None = None
    ops_applied: tuple[dict[str, Any], ...] = ()
    notes: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Certificate:
    """
    A claimed pattern witness.

    Attributes
    ----------
    kind : PatternKind
        The pattern claimed.
    params : dict
        ``{'k': int}``, ``{'n': int}``, ``{'bounds': [int, ...]}`` or ``{}``
        depending on ``kind``.
    payload : LabeledTree or InpArray
        The witness itself.
    verdict : Verdict or None
        Filled in by verification.
    provenance : Provenance or None
        Filled in by transforms.
    """

    kind: PatternKind
    params: dict[str, Any]
    payload: LabeledTree | InpArray
    verdict: Verdict | None = None
    provenance: Provenance | None = None

    @property
    def ok(self) -> bool:
        return self.verdict is not None and self.verdict.ok

    def with_verdict(self, verdict: Verdict) -> 'Certificate':
        return replace(self, verdict=verdict)

    def with_provenance(self, provenance: Provenance) -> 'Certificate':
        return replace(self, provenance=provenance)

    def as_kind(self, kind: PatternKind, params: dict[str, Any]) -> 'Certificate':
        """Same payload claimed as another kind; the verdict is dropped."""
        return Certificate(kind=kind, params=dict(params), payload=self.payload)
