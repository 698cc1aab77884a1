from fastapi import APIRouter, Depends
import logging

from app.core.errors import PlanarMapError
from app.schemas.verification import VerificationSummary, VerifyRequest
from app.services.verify_service import CHECKS, VerifyService
from app.api.deps import get_verify_service, to_http_exception

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/verify", tags=["verify"])


@router.get("/", summary="List Checks")
def list_checks():
    return {"checks": list(CHECKS)}


@router.post("/{check}", response_model=VerificationSummary, summary="Run Identity Check")
def run_check(check: str, request: VerifyRequest, service: VerifyService = Depends(get_verify_service)):
    """
    Run one named identity check. A failing identity is still a 200
    response with ``passed`` false; malformed input is 400 and a refused
    enumeration is 413.
    """
    try:
        return service.run(check, request)
    except PlanarMapError as e:
        logger.warning(f"verify {check} refused: {e}")
        raise to_http_exception(e)
