from django.apps import AppConfig


class ProfilesConfig(AppConfig):
    name = 'apps.profiles'
    verbose_name = 'Frequency profiles'
