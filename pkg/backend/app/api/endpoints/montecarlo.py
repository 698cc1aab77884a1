from fastapi import APIRouter, Depends
import logging

from app.core.errors import PlanarMapError
from app.models.permutation import MapInstance
from app.schemas.montecarlo import ConvergenceReport, MonteCarloRequest
from app.services.guemc_service import GueMonteCarloService
from app.api.deps import get_guemc_service, to_http_exception

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/montecarlo", tags=["montecarlo"])


@router.post("", response_model=ConvergenceReport, summary="GUE Cumulant Convergence")
def convergence(request: MonteCarloRequest, service: GueMonteCarloService = Depends(get_guemc_service)):
    try:
        inst = MapInstance.parse(request.theta, request.gamma, request.n)
        return service.convergence_report(inst.theta, inst.gamma, request.grid, request.samples, request.seed)
    except PlanarMapError as e:
        logger.warning(f"montecarlo refused for {request.theta!r}: {e}")
        raise to_http_exception(e)
