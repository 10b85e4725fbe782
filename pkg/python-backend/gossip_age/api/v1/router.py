from fastapi import APIRouter

from gossip_age.api.v1.endpoints import analytics, health

api_router = APIRouter()
api_router.include_router(health.router, prefix="/health", tags=["health"])
api_router.include_router(analytics.router, tags=["analytics"])
