from fastapi import APIRouter, HTTPException

from api.errors import BAD_REQUEST, TIMEOUT, UNPROCESSABLE
from core.config import settings
from core.exceptions import AppBaseException
from models.patterns import PatternKind
from models.schemas import CertificateSchema, SearchOutcomeSchema, SearchRequest
from models.tree import TreeShape
from services.pattern_service import PatternService
from services.search_service import SearchService

router = APIRouter(prefix='/patterns', tags=['patterns'])


def _dims(text: str) -> tuple[int, int]:
    try:
        rows, cols = text.lower().split('x')
        return int(rows), int(cols)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=f"Expected dims 'RxC', got '{text}'") from e


@router.post('/verify', response_model=CertificateSchema)
def verify_certificate(certificate: CertificateSchema, cap: int | None = None):
    """
    Verify a certificate.

    Parameters
    ----------
    certificate : CertificateSchema
        Certificate with embedded payload; any verdict it carries is ignored
    cap : int, optional
        Maximum number of violations reported

    Returns
    -------
    CertificateSchema
        The certificate with a fresh verdict
    """
    try:
        pattern_service = PatternService(settings)
        return CertificateSchema.from_domain(pattern_service.verify(certificate.to_domain(), cap=cap))
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get('/canonical/{kind}', response_model=CertificateSchema)
def get_canonical_witness(kind: str, shape: str | None = None, dims: str | None = None):
    """
    Standard witness of a pattern kind.

    Parameters
    ----------
    kind : str
        SOP2, TP1, SCT, TP2 or INP
    shape : str, optional
        Tree shape ``BxD`` for tree kinds
    dims : str, optional
        Array dimensions ``RxC`` for array kinds
    """
    try:
        pattern_service = PatternService(settings)
        c = pattern_service.canonical_witness(
            PatternKind.parse(kind),
            TreeShape.parse(shape) if shape else None,
            _dims(dims) if dims else None,
        )
        return CertificateSchema.from_domain(c)
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))
    except TIMEOUT as e:
        raise HTTPException(status_code=408, detail=str(e))


@router.post('/search', response_model=SearchOutcomeSchema)
def search_witness(request: SearchRequest):
    """
    Search a set system for a witness.

    Returns
    -------
    SearchOutcomeSchema
        ``found`` with a verified certificate, ``none`` after exhausting the
        space, or ``unknown`` when the deadline hit first
    """
    try:
        search_service = SearchService(settings)
        return SearchOutcomeSchema.from_domain(search_service.search(request.spec.to_domain(), request.system.to_domain()))
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))
    except UNPROCESSABLE as e:
        raise HTTPException(status_code=422, detail=str(e))
    except TIMEOUT as e:
        raise HTTPException(status_code=408, detail=str(e))
    except AppBaseException as e:
        raise HTTPException(status_code=500, detail=str(e))
