from django.apps import AppConfig


class AugmentConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'augment'
    verbose_name = 'Augmentation'
