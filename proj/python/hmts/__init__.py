"""Hierarchical-modulation time sharing over a multicast satellite beam."""

from ._hmts import *  # noqa: F401,F403
from ._hmts import DATA_DIR, ValidationError, ParseError  # noqa: F401
