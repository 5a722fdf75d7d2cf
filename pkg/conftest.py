import os

import django
from django.test.utils import setup_test_environment

# Stessa preparazione che fa il test runner di Django (manage.py test)
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
django.setup()
setup_test_environment()
