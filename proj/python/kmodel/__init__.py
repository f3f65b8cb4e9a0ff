"""Knowledge familiarity modelling from reading activity."""

from ._kmodel import *  # noqa: F401,F403
from ._kmodel import __doc__  # noqa: F401
