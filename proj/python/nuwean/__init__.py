"""Weaning-outcome prediction pipeline for non-uniformly sampled series."""

from nuwean._core import *  # noqa: F401,F403
from nuwean._core import __doc__  # noqa: F401
