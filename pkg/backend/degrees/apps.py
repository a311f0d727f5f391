from django.apps import AppConfig


class DegreesConfig(AppConfig):
    name = 'degrees'
    verbose_name = 'Degree distribution fitting'
