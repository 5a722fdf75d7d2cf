from django.apps import AppConfig


class SistemiConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'sistemi'
    verbose_name = 'Sistemi dinamici'
