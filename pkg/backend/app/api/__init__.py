from fastapi import APIRouter
from app.api.endpoints import maps, montecarlo, verify

api_router = APIRouter()

api_router.include_router(maps.router)
api_router.include_router(verify.router)
api_router.include_router(montecarlo.router)
