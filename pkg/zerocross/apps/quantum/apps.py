from django.apps import AppConfig


class QuantumConfig(AppConfig):
    name = 'apps.quantum'
    verbose_name = 'Quantum observables'
