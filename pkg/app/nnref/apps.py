from django.apps import AppConfig


class NnrefConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'nnref'
    verbose_name = 'Reference kernels'
