from fastapi import APIRouter, HTTPException

from api.errors import BAD_REQUEST, TIMEOUT, UNPROCESSABLE
from core.config import settings
from core.exceptions import AppBaseException
from models.schemas import CertificateSchema, TransformRequest
from services.transform_service import TRANSFORM_NAMES, TransformService, run_transform

router = APIRouter(prefix='/transforms', tags=['transforms'])


@router.get('/', response_model=list[str])
def list_transforms():
    return list(TRANSFORM_NAMES)


@router.post('/{name}', response_model=CertificateSchema)
def apply_transform(name: str, request: TransformRequest):
    """
    Run a transform on a certificate.

    Parameters
    ----------
    name : str
        Transform name, e.g. ``cdt2-to-sct``
    request : TransformRequest
        Input certificate and transform parameters (m, k, n, target,
        path_intersect)

    Returns
    -------
    CertificateSchema
        Verified output certificate with its provenance
    """
    if name.replace('_', '-').lower() not in TRANSFORM_NAMES:
        raise HTTPException(status_code=404, detail=f"Unknown transform '{name}'")
    try:
        transform_service = TransformService(settings)
        result = run_transform(transform_service, name, request.certificate.to_domain(), dict(request.params))
        return CertificateSchema.from_domain(result)
    except BAD_REQUEST as e:
        raise HTTPException(status_code=400, detail=str(e))
    except UNPROCESSABLE as e:
        raise HTTPException(status_code=422, detail=str(e))
    except TIMEOUT as e:
        raise HTTPException(status_code=408, detail=str(e))
    except AppBaseException as e:
        raise HTTPException(status_code=500, detail=str(e))
