import uvicorn
from fastapi import FastAPI

from api.endpoints import (
    pattern_routes,
    pfc_routes,
    transform_routes,
    tree_routes,
)
from core.config import app_settings
from core.log_config import configure_logging

configure_logging()

app = FastAPI(
    title='tpkit',
    description=app_settings.description,
    summary='Tree indices, pattern certificates, transforms and parametrized amalgamation',
    version=app_settings.version,
    debug=app_settings.debug,
)

app.include_router(tree_routes.router)
app.include_router(pattern_routes.router)
app.include_router(transform_routes.router)
app.include_router(pfc_routes.router)


@app.get('/health')
def health():
    return {'name': app_settings.name, 'version': app_settings.version}


def main():
    uvicorn.run('main:app', host=app_settings.host, port=app_settings.port, reload=not app_settings.is_production)


if __name__ == "__main__":
    main()
