"""Pytest wiring: point Django at the project settings before test collection."""
import os
import sys

import django

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'backend'))
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tailfit.settings')
django.setup()
