"""
스윕 작업 (Celery 백엔드)
"""

import logging

from celery import shared_task

from .services import evaluate_phase_point

logger = logging.getLogger(__name__)


@shared_task(name="integrator.evaluate_phase_point")
def evaluate_phase_point_task(payload: dict) -> dict:
    """스윕 한 점을 워커에서 계산"""
    logger.info("phase point %s G=%s", payload.get("profile"), payload.get("G"))
    return evaluate_phase_point(payload)
