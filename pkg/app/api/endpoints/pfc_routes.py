from fastapi import APIRouter, HTTPException

from api.errors import BAD_REQUEST, TIMEOUT, UNPROCESSABLE
from core.config import settings
from core.exceptions import AppBaseException
from models.schemas import (
    AmalgamateRequest,
    CertificateSchema,
    CoverRequest,
    FinRelStructureSchema,
    PfcAmalgamSchema,
    PfcStructureSchema,
    Tp2DemoSchema,
)
from services.oracles import get_oracle
from services.pfc_service import PfcService, imaginary_cover, pfc_amalgamate

router = APIRouter(prefix='/pfc', tags=['pfc'])


@router.post('/amalgamate', response_model=PfcAmalgamSchema)
def amalgamate(request: AmalgamateRequest):
    """
    Strong amalgam of two extensions of a common part.

    Parameters
    ----------
    request : AmalgamateRequest
        Base class name and the three parametrized structures

    Returns
    -------
    PfcAmalgamSchema
        The amalgam and the renamings of both sides
    """
    try:
        amalgam = pfc_amalgamate(
            get_oracle(request.base),
            request.common.to_domain(),
            request.left.to_domain(),
            request.right.to_domain(),
        )
        return PfcAmalgamSchema(
            structure=PfcStructureSchema.from_domain(amalgam.structure),
            left_objects=dict(amalgam.left_objects),
            right_objects=dict(amalgam.right_objects),
            right_parameters=dict(amalgam.right_parameters),
        )
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))
    except UNPROCESSABLE as e:
        raise HTTPException(status_code=422, detail=str(e))
    except AppBaseException as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post('/cover', response_model=FinRelStructureSchema)
def cover(request: CoverRequest):
    try:
        return FinRelStructureSchema.from_domain(
            imaginary_cover(request.structure.to_domain(), request.class_size, request.relation)
        )
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get('/tp2-demo', response_model=Tp2DemoSchema)
def tp2_demo(rows: int, cols: int):
    """
    TP2 array read off an amalgam of equivalence relations.

    Parameters
    ----------
    rows : int
        Number of parameters
    cols : int
        Number of base objects
    """
    try:
        pfc_service = PfcService(settings)
        c, structure = pfc_service.tp2_demo(rows, cols)
        return Tp2DemoSchema(certificate=CertificateSchema.from_domain(c), structure=PfcStructureSchema.from_domain(structure))
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))
    except TIMEOUT as e:
        raise HTTPException(status_code=408, detail=str(e))
