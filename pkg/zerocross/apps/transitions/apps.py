from django.apps import AppConfig


class TransitionsConfig(AppConfig):
    name = 'apps.transitions'
    verbose_name = 'Crossing composition'
