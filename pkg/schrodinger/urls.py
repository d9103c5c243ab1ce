from django.urls import path
from .views import run_api

urlpatterns = [
    path('api/runs/', run_api.api_runs, name='api_runs'),
    path('api/runs/<int:run_id>/', run_api.api_run_detail, name='api_run_detail'),
    path('api/runs/logs/', run_api.api_get_logs, name='api_get_logs'),  # For log polling
]
