import os

from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')

app = Celery('zerocross')

# CELERY_ 접두사 설정을 Django settings에서 읽음
app.config_from_object('django.conf:settings', namespace='CELERY')
app.autodiscover_tasks()
