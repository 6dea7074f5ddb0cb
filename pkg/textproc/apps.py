from django.apps import AppConfig


class TextprocConfig(AppConfig):
    name = 'textproc'
    verbose_name = 'Text Normalization'
