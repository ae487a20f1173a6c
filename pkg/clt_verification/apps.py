from django.apps import AppConfig


class CltVerificationConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'clt_verification'
    verbose_name = 'Stein-Malliavin CLT verification'
