"""
JSON wire schemas.

Each schema mirrors one domain value and converts both ways with
``from_domain`` / ``to_domain``. Nodes travel in their text form
(``'e'``, ``'0'``, ``'0.1.2'``).
"""
from typing import Any

from sqlmodel import SQLModel, Field

from core.exceptions import ValidationError
from models.nodemap import NodeMap
from models.patterns import (
    Certificate,
    InpArray,
    LabeledTree,
    PatternKind,
    Provenance,
    SetSystem,
    Verdict,
    Violation,
)
from models.pfc import FinRelStructure, PfcStructure
from models.search import SearchOutcome, SearchSpec
from models.tree import Lang, QfType, TreeShape, node_to_str, parse_node


class ShapeSchema(SQLModel):
    """Tree shape as ``{b, d}``: branching and depth."""

    b: int = Field(ge=0)
    d: int = Field(ge=0)

    @classmethod
    def from_domain(cls, shape: TreeShape) -> 'ShapeSchema':
        return cls(b=shape.branching, d=shape.depth)

    def to_domain(self) -> TreeShape:
        return TreeShape(self.b, self.d)


class QfTypeSchema(SQLModel):
    lang: str
    arity: int
    terms: list[str] = []
    eq: list[list[int]]
    le: list[list[bool]]
    lex: list[list[bool]]
    levels: list[int] | None = None

    @classmethod
    def from_domain(cls, t: QfType) -> 'QfTypeSchema':
        return cls(
            lang=t.lang.value,
            arity=t.arity,
            terms=[node_to_str(n) for n in t.terms],
            eq=[list(c) for c in t.eq],
            le=[list(row) for row in t.le],
            lex=[list(row) for row in t.lex],
            levels=list(t.levels) if t.levels is not None else None,
        )


class NodeMapSchema(SQLModel):
    """
    A node map as ``{op, params, source, target, image}``.

    ``image`` sends target node strings to lists of source node strings.
    """

    op: str
    params: dict[str, Any] = {}
    source: ShapeSchema
    target: ShapeSchema
    image: dict[str, list[str]]

    @classmethod
    def from_domain(cls, m: NodeMap) -> 'NodeMapSchema':
        return cls(
            op=m.op,
            params=m.params,
            source=ShapeSchema.from_domain(m.source),
            target=ShapeSchema.from_domain(m.target),
            image={node_to_str(node): [node_to_str(s) for s in images] for node, images in m.image.items()},
        )

    def to_domain(self) -> NodeMap:
        return NodeMap(
            op=self.op,
            params=dict(self.params),
            source=self.source.to_domain(),
            target=self.target.to_domain(),
            image={parse_node(node): tuple(parse_node(s) for s in images) for node, images in self.image.items()},
        )


class SetSystemSchema(SQLModel):
    domain_size: int = Field(ge=0)
    sets: dict[str, list[int]]

    @classmethod
    def from_domain(cls, system: SetSystem) -> 'SetSystemSchema':
        return cls(domain_size=system.domain_size, sets={name: sorted(s) for name, s in system.sets.items()})

    def to_domain(self) -> SetSystem:
        return SetSystem(self.domain_size, {name: frozenset(s) for name, s in self.sets.items()})


class LabeledTreeSchema(SQLModel):
    branching: int = Field(ge=0)
    depth: int = Field(ge=0)
    domain_size: int = Field(ge=0)
    labels: dict[str, list[int]]

    @classmethod
    def from_domain(cls, tree: LabeledTree) -> 'LabeledTreeSchema':
        return cls(
            branching=tree.shape.branching,
            depth=tree.shape.depth,
            domain_size=tree.domain_size,
            labels={node_to_str(node): sorted(tree.label(node)) for node in tree.shape.labeled_nodes},
        )

    def to_domain(self) -> LabeledTree:
        labels = {parse_node(node): frozenset(members) for node, members in self.labels.items()}
        return LabeledTree(TreeShape(self.branching, self.depth), self.domain_size, labels)


class InpArraySchema(SQLModel):
    rows: int = Field(ge=0)
    cols: int = Field(ge=0)
    domain_size: int = Field(ge=0)
    cells: list[list[list[int]]]

    @classmethod
    def from_domain(cls, array: InpArray) -> 'InpArraySchema':
        return cls(
            rows=array.rows,
            cols=array.cols,
            domain_size=array.domain_size,
            cells=[[sorted(cell) for cell in row] for row in array.cells],
        )

    def to_domain(self) -> InpArray:
        cells = tuple(tuple(frozenset(cell) for cell in row) for row in self.cells)
        return InpArray(self.rows, self.cols, self.domain_size, cells)


class ViolationSchema(SQLModel):
    rule: str
    nodes: list[str] = []
    cells: list[list[int]] = []
    text: str = ''

    @classmethod
    def from_domain(cls, v: Violation) -> 'ViolationSchema':
        return cls(rule=v.rule, nodes=[node_to_str(n) for n in v.nodes], cells=[list(c) for c in v.cells],
                   text=v.describe())

    def to_domain(self) -> Violation:
        return Violation(self.rule, tuple(parse_node(n) for n in self.nodes), tuple((i, j) for i, j in self.cells))


class VerdictSchema(SQLModel):
    ok: bool
    violations: list[ViolationSchema] = []
    truncated: bool = False

    @classmethod
    def from_domain(cls, v: Verdict) -> 'VerdictSchema':
        return cls(ok=v.ok, violations=[ViolationSchema.from_domain(x) for x in v.violations], truncated=v.truncated)

    def to_domain(self) -> Verdict:
        return Verdict(self.ok, tuple(v.to_domain() for v in self.violations), self.truncated)


class ProvenanceSchema(SQLModel):
    """Provenance record; field names are the wire keys."""

    transform: str
    caseFired: str | None = None
    minimalK: int | None = None
    N: int | None = None
    opsApplied: list[dict[str, Any]] = []
    notes: dict[str, Any] = {}

    @classmethod
    def from_domain(cls, p: Provenance) -> 'ProvenanceSchema':
        return cls(
            transform=p.transform,
            caseFired=p.case_fired,
            minimalK=p.minimal_k,
            N=p.n_levels,
            opsApplied=list(p.ops_applied),
            notes=p.notes,
        )

    def to_domain(self) -> Provenance:
        return Provenance(self.transform, self.caseFired, self.minimalK, self.N, tuple(self.opsApplied), dict(self.notes))


class CertificateSchema(SQLModel):
    """
    Self-contained certificate: the payload is embedded, so verifying a
    certificate file needs no other input.

    The payload is a labeled tree (``branching``/``depth``/``labels``) or an
    array (``rows``/``cols``/``cells``), depending on the kind.
    """

    kind: str
    params: dict[str, Any] = {}
    payload: dict[str, Any]
    verdict: VerdictSchema | None = None
    provenance: ProvenanceSchema | None = None

    @classmethod
    def from_domain(cls, c: Certificate) -> 'CertificateSchema':
        if isinstance(c.payload, InpArray):
            payload = InpArraySchema.from_domain(c.payload).model_dump()
        else:
            payload = LabeledTreeSchema.from_domain(c.payload).model_dump()
        return cls(
            kind=c.kind.value,
            params=c.params,
            payload=payload,
            verdict=VerdictSchema.from_domain(c.verdict) if c.verdict is not None else None,
            provenance=ProvenanceSchema.from_domain(c.provenance) if c.provenance is not None else None,
        )

    def to_domain(self) -> Certificate:
        kind = PatternKind.parse(self.kind)
        if kind.uses_array:
            payload = InpArraySchema.model_validate(self.payload).to_domain()
        else:
            payload = LabeledTreeSchema.model_validate(self.payload).to_domain()
        return Certificate(
            kind=kind,
            params=dict(self.params),
            payload=payload,
            verdict=self.verdict.to_domain() if self.verdict is not None else None,
            provenance=self.provenance.to_domain() if self.provenance is not None else None,
        )


class SearchSpecSchema(SQLModel):
    """Search request; exactly one of ``shape`` (``'BxD'``) and ``dims`` is used."""

    kind: str
    params: dict[str, Any] = {}
    shape: str | None = None
    dims: list[int] | None = None
    family: list[str] | None = None
    budget_assignments: int | None = Field(default=None, ge=1)
    deadline_seconds: float | None = Field(default=None, ge=0)
    prune: bool = True
    threads: int | None = Field(default=None, ge=1)

    def to_domain(self) -> SearchSpec:
        kind = PatternKind.parse(self.kind)
        if kind.uses_array:
            if self.dims is None or len(self.dims) != 2:
                raise ValidationError({'dims': f'{kind.value} search needs dims [rows, cols]'})
            shape, dims = None, (self.dims[0], self.dims[1])
        else:
            if self.shape is None:
                raise ValidationError({'shape': f"{kind.value} search needs a shape 'BxD'"})
            shape, dims = TreeShape.parse(self.shape), None
        return SearchSpec(
            kind=kind,
            params=dict(self.params),
            shape=shape,
            dims=dims,
            family=tuple(self.family) if self.family is not None else None,
            budget_assignments=self.budget_assignments,
            deadline_seconds=self.deadline_seconds,
            prune=self.prune,
            threads=self.threads,
        )


class SearchOutcomeSchema(SQLModel):
    status: str
    certificate: CertificateSchema | None = None
    space_size: int = 0
    explored: int = 0
    assignment: list[int] | None = None

    @classmethod
    def from_domain(cls, outcome: SearchOutcome) -> 'SearchOutcomeSchema':
        return cls(
            status=outcome.status.value,
            certificate=CertificateSchema.from_domain(outcome.certificate) if outcome.certificate is not None else None,
            space_size=outcome.space_size,
            explored=outcome.explored,
            assignment=list(outcome.assignment) if outcome.assignment is not None else None,
        )


class RelationSymbolSchema(SQLModel):
    name: str
    arity: int = Field(ge=1)


def _signature_to_wire(signature) -> list[RelationSymbolSchema]:
    return [RelationSymbolSchema(name=name, arity=arity) for name, arity in signature]


def _signature_from_wire(signature: list[RelationSymbolSchema]) -> tuple[tuple[str, int], ...]:
    return tuple((s.name, s.arity) for s in signature)


class FinRelStructureSchema(SQLModel):
    universe: list[str]
    signature: list[RelationSymbolSchema]
    relations: dict[str, list[list[str]]] = {}

    @classmethod
    def from_domain(cls, s: FinRelStructure) -> 'FinRelStructureSchema':
        return cls(
            universe=sorted(s.universe),
            signature=_signature_to_wire(s.signature),
            relations={name: sorted(list(t) for t in tuples) for name, tuples in s.relations.items()},
        )

    def to_domain(self) -> FinRelStructure:
        return FinRelStructure.build(self.universe, _signature_from_wire(self.signature), self.relations)


class PfcStructureSchema(SQLModel):
    """Objects, ordered parameters and the relations holding under each parameter."""

    objects: list[str]
    parameters: list[str]
    signature: list[RelationSymbolSchema]
    structures: dict[str, dict[str, list[list[str]]]] = {}

    @classmethod
    def from_domain(cls, s: PfcStructure) -> 'PfcStructureSchema':
        return cls(
            objects=sorted(s.objects),
            parameters=list(s.parameters),
            signature=_signature_to_wire(s.signature),
            structures={
                b: {name: sorted(list(t) for t in tuples) for name, tuples in s.structures[b].relations.items()}
                for b in s.parameters
            },
        )

    def to_domain(self) -> PfcStructure:
        signature = _signature_from_wire(self.signature)
        missing = [b for b in self.parameters if b not in self.structures]
        if missing:
            raise ValidationError({'structures': f'No relations given for parameters {missing}'})
        structures = {b: FinRelStructure.build(self.objects, signature, self.structures[b]) for b in self.parameters}
        return PfcStructure(frozenset(self.objects), tuple(self.parameters), signature, structures)


class PfcAmalgamSchema(SQLModel):
    structure: PfcStructureSchema
    left_objects: dict[str, str]
    right_objects: dict[str, str]
    right_parameters: dict[str, str]


def parse_lang(text: str) -> Lang:
    try:
        return Lang(text)
    except ValueError:
        for lang in Lang:
            if lang.name.lower() == text.lower() or lang.value.lower() == text.lower():
                return lang
        raise ValidationError({'lang': f"Unknown language '{text}', expected one of {[lang.value for lang in Lang]}"})


# ------------------------------------------------------------- requests


class QftpRequest(SQLModel):
    nodes: list[str]
    lang: str = 'L0'


class MeetClosureRequest(SQLModel):
    nodes: list[str]


class OpRequest(SQLModel):
    """``target``/``source`` are shapes as ``'BxD'``."""

    op: str
    params: dict[str, Any] = {}
    target: str | None = None
    source: str | None = None


class SearchRequest(SQLModel):
    spec: SearchSpecSchema
    system: SetSystemSchema


class TransformRequest(SQLModel):
    certificate: CertificateSchema
    params: dict[str, Any] = {}


class AmalgamateRequest(SQLModel):
    base: str
    common: PfcStructureSchema
    left: PfcStructureSchema
    right: PfcStructureSchema


class CoverRequest(SQLModel):
    structure: FinRelStructureSchema
    class_size: int = Field(ge=1)
    relation: str = 'E'


class Tp2DemoSchema(SQLModel):
    certificate: CertificateSchema
    structure: PfcStructureSchema
