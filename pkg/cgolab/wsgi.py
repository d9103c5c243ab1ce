"""
WSGI entry point for the cgolab run browser (admin plus JSON run endpoints).
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cgolab.settings')

application = get_wsgi_application()
