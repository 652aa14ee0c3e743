"""
Core application module: settings, Celery app, shared errors and helpers.
"""
from .celery import app as celery_app

__all__ = ('celery_app',)
