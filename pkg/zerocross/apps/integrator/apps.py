from django.apps import AppConfig


class IntegratorConfig(AppConfig):
    name = 'apps.integrator'
    verbose_name = 'Mode integrator'
