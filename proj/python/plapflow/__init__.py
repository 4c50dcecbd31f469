from ._plapflow import *  # noqa: F401,F403
