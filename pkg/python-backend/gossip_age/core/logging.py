import logging
import json
from datetime import datetime
from typing import Dict, Any, Optional

from fastapi import Request
from starlette.middleware.base import BaseHTTPMiddleware

from gossip_age.core.config import settings

# Configure logging; handlers write to stderr so stdout only carries results
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL, logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger("gossip-age")


class LoggingMiddleware(BaseHTTPMiddleware):
    async def dispatch(self, request: Request, call_next):
        start_time = datetime.utcnow()

        response = await call_next(request)

        process_time = (datetime.utcnow() - start_time).total_seconds() * 1000
        log_dict = {
            "timestamp": datetime.utcnow().isoformat(),
            "method": request.method,
            "path": request.url.path,
            "status_code": response.status_code,
            "process_time_ms": process_time,
            "client_ip": request.client.host if request.client else None,
        }

        logger.info(f"Request: {json.dumps(log_dict)}")

        return response


def log_run_event(action: str, details: Optional[Dict[str, Any]] = None) -> None:
    """
    Log a CLI or API run for auditing purposes
    """
    log_entry = {
        "timestamp": datetime.utcnow().isoformat(),
        "action": action,
        "details": details or {},
    }
    logger.info(f"Run Event: {json.dumps(log_entry, default=str)}")
