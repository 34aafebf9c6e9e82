from django.apps import AppConfig


class SpecfunConfig(AppConfig):
    name = 'apps.specfun'
    verbose_name = 'Special functions'
