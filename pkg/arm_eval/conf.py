"""Access to the ARM_EVAL settings block with per-key fallbacks."""

from django.conf import settings


def arm_setting(name, default=None):
    return getattr(settings, 'ARM_EVAL', {}).get(name, default)
