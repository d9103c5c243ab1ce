"""
ASGI entry point for the cgolab run browser.
"""

import os

from django.core.asgi import get_asgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cgolab.settings')

application = get_asgi_application()
