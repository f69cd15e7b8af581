# SPDX-License-Identifier: Apache-2.0
"""Multi-view graph convolutional population forecasting."""

from ._acmv import *  # noqa: F401,F403
from ._acmv import __version__  # noqa: F401
