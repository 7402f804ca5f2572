from ._kosmann import *  # noqa: F401,F403
