"""
Celery tasks for augmentation.
"""
import logging

from celery import shared_task

from core.exceptions import SeafarmError

logger = logging.getLogger(__name__)


@shared_task
def augment_image_task(payload):
    """
    Augment one image and write the result.

    Args:
        payload (dict): Image record, paths, annotations, spec and seed

    Returns:
        dict: status plus the augmented size and annotations on success
    """
    image_id = payload['image']['id']

    try:
        from .pipeline import augment_payload

        result = augment_payload(payload)
        return {"status": "success", **result}

    except SeafarmError as e:
        logger.error(f"Error augmenting image {image_id}: {e.message}")
        return {"status": "error", "image_id": image_id, "message": e.message, "error": e.to_dict()}

    except Exception as e:
        logger.error(f"Error augmenting image {image_id}: {str(e)}")
        return {
            "status": "error",
            "image_id": image_id,
            "message": str(e),
            "error": {"code": "unexpected", "message": str(e)},
        }
