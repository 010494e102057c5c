"""Optomechanical cooling model: cavity back-action, Langevin simulation and PSD fitting."""

from ._optomech import *  # noqa: F401,F403
from ._optomech import __version__, OptomechError  # noqa: F401
