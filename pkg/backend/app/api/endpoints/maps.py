from fastapi import APIRouter, Depends
from typing import List
import logging

from app.core.errors import PlanarMapError
from app.models.permutation import MapInstance
from app.schemas.mapcount import GeneratingTableRequest, GeneratingTableRow, MapCountReport, MapCountRequest
from app.services.mapcount_service import MapCountService
from app.api.deps import get_mapcount_service, to_http_exception

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/maps", tags=["maps"])


@router.post("/count", response_model=MapCountReport, summary="Count Planar Colored Maps")
def count_maps(request: MapCountRequest, service: MapCountService = Depends(get_mapcount_service)):
    """
    Enumerate the color-respecting matchings iota that act transitively
    together with theta, and bucket them by genus.
    """
    try:
        inst = MapInstance.parse(request.theta, request.gamma, request.n)
        return service.count_map0(inst)
    except PlanarMapError as e:
        logger.warning(f"count refused for {request.theta!r}: {e}")
        raise to_http_exception(e)


@router.post("/table", response_model=List[GeneratingTableRow], summary="Generating Function Coefficients")
def generating_table(request: GeneratingTableRequest, service: MapCountService = Depends(get_mapcount_service)):
    try:
        return service.generating_table(request.shape, request.max_orders, request.degree_cap, workers=1)
    except PlanarMapError as e:
        logger.warning(f"table refused for shape {request.shape}: {e}")
        raise to_http_exception(e)
