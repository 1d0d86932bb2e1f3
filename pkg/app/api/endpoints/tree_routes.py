from fastapi import APIRouter, HTTPException

from api.errors import BAD_REQUEST
from core.exceptions import AppBaseException
from models.schemas import MeetClosureRequest, NodeMapSchema, OpRequest, QfTypeSchema, QftpRequest, parse_lang
from models.tree import TreeShape, node_to_str, parse_node
from services.treeidx import meet_closure, qftp
from services.treeops import OpDescriptor, build_op

router = APIRouter(prefix='/trees', tags=['trees'])


@router.post('/qftp', response_model=QfTypeSchema)
def get_qftp(request: QftpRequest):
    """
    Compute the quantifier-free type of a tuple of nodes.

    Parameters
    ----------
    request : QftpRequest
        Node strings and the language (``L0`` or ``Ls``)

    Returns
    -------
    QfTypeSchema
        Canonical type
    """
    try:
        return QfTypeSchema.from_domain(qftp([parse_node(n) for n in request.nodes], parse_lang(request.lang)))
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.post('/meet-closure', response_model=list[str])
def get_meet_closure(request: MeetClosureRequest):
    """
    Close a tuple of nodes under meets.

    Returns
    -------
    list[str]
        The closure in lex order
    """
    try:
        return [node_to_str(n) for n in meet_closure([parse_node(n) for n in request.nodes])]
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.post('/ops', response_model=NodeMapSchema)
def build_operation(request: OpRequest):
    """
    Build a tree operation as a node map.

    Parameters
    ----------
    request : OpRequest
        Operation name, parameters and shapes

    Returns
    -------
    NodeMapSchema
        The node map with its image table
    """
    try:
        target = TreeShape.parse(request.target) if request.target else None
        source = TreeShape.parse(request.source) if request.source else None
        return NodeMapSchema.from_domain(build_op(OpDescriptor(request.op, dict(request.params)), target, source))
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))
    except AppBaseException as e:
        raise HTTPException(status_code=500, detail=str(e))
