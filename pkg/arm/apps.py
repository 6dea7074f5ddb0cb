from django.apps import AppConfig


class ArmConfig(AppConfig):
    name = 'arm'
    verbose_name = 'Ambiguity Rewrite Metric'
