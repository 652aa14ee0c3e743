"""
Celery tasks for clone-image synthesis.
"""
import logging

from celery import shared_task

from core.exceptions import SeafarmError

logger = logging.getLogger(__name__)


@shared_task
def synthesize_image_task(payload):
    """
    Embed the scheduled objects into one background image.

    Args:
        payload (dict): Image record, source/output paths, annotations,
            counts, object set directory, spec, policy, seed and round

    Returns:
        dict: status plus the new annotations and embed records on success
    """
    image_id = payload['image']['id']
    logger.info(f"Synthesizing image {image_id} (round {payload['round']})")

    try:
        from .generation import synthesize_payload

        result = synthesize_payload(payload)

        logger.info(f"Image {image_id} done: embedded {result['embedded']}")
        return {"status": "success", **result}

    except SeafarmError as e:
        logger.error(f"Error synthesizing image {image_id}: {e.message}")
        return {"status": "error", "image_id": image_id, "message": e.message, "error": e.to_dict()}

    except Exception as e:
        logger.error(f"Error synthesizing image {image_id}: {str(e)}")
        return {
            "status": "error",
            "image_id": image_id,
            "message": str(e),
            "error": {"code": "unexpected", "message": str(e)},
        }
