"""
WSGI config for the Lotka-Volterra lab project.

Espone l'API dei preset in sola lettura; le simulazioni si lanciano con ``python manage.py lotka``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')

application = get_wsgi_application()
