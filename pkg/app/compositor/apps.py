from django.apps import AppConfig


class CompositorConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'compositor'
    verbose_name = 'Compositor'
