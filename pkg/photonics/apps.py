from django.apps import AppConfig


class PhotonicsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "photonics"
    verbose_name = "Layered photonic structures"
