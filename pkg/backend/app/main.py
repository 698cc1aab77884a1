from fastapi import FastAPI
from app.core.config import settings
from app.core.logging import configure_logging
from app.api import api_router


def create_app() -> FastAPI:
    """Create FastAPI application"""
    configure_logging(settings.LOG_LEVEL)

    app = FastAPI(
        title=settings.PROJECT_NAME,
        version=settings.VERSION,
        description="""
        ## Planar Map Arboreal Toolkit

        Exact enumeration of planar colored maps and the identities relating
        them to spanning-tree expansions of Gaussian and GUE cumulants.

        - **maps**: count planar maps for a permutation and coloring; generating-function tables
        - **verify**: run a named identity check (main, malliavin, bkar, kirchhoff, ...)
        - **montecarlo**: GUE convergence of normalized trace cumulants

        Exact rationals are serialized as strings such as `"3/2"`.
        """,
        openapi_url=f"{settings.API_V1_STR}/openapi.json",
        docs_url="/docs",
        redoc_url="/redoc"
    )

    app.include_router(api_router, prefix=settings.API_V1_STR)

    return app

app = create_app()

@app.get("/")
def root():
    """API root endpoint"""
    return {
        "message": f"{settings.PROJECT_NAME} is running",
        "version": settings.VERSION,
        "docs": "/docs"
    }

@app.get("/health")
def health_check():
    """Health check endpoint"""
    return {"status": "healthy"}
