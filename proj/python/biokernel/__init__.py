from ._biokernel import *  # noqa: F401,F403
