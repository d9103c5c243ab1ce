from django.apps import AppConfig


class SchrodingerConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'schrodinger'
    verbose_name = 'CGO reconstruction lab'
