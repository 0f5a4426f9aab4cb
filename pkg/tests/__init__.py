from graphsampling import adaptive as adaptive  # noqa: F401
from graphsampling import diffusion as diffusion  # noqa: F401
from graphsampling import types as types  # noqa: F401
from graphsampling.spectral import (  # noqa: F401
    SpectralBasis as SpectralBasis,
)
