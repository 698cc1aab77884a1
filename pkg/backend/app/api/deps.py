from fastapi import HTTPException

from app.core.errors import CapExceededError, PlanarMapError
from app.services.guemc_service import GueMonteCarloService
from app.services.mapcount_service import MapCountService
from app.services.verify_service import VerifyService

_verify_service_instance = None


# Dependency injection
def get_verify_service() -> VerifyService:
    global _verify_service_instance
    if _verify_service_instance is None:
        _verify_service_instance = VerifyService()
    return _verify_service_instance


def get_mapcount_service() -> MapCountService:
    return get_verify_service().mapcount_service


def get_guemc_service() -> GueMonteCarloService:
    return get_verify_service().guemc_service


def to_http_exception(error: PlanarMapError) -> HTTPException:
    """Resource caps are 413, every other domain error is 400."""
    if isinstance(error, CapExceededError):
        return HTTPException(status_code=413, detail=str(error))
    return HTTPException(status_code=400, detail=str(error))
