from graphsampling import adaptive as adaptive  # noqa: F401
from graphsampling import design as design  # noqa: F401
from graphsampling import diffusion as diffusion  # noqa: F401
from graphsampling import recovery as recovery  # noqa: F401
from graphsampling import types as types  # noqa: F401
from graphsampling.spectral import (  # noqa: F401
    SpectralBasis as SpectralBasis,
)
from graphsampling.spectral import (  # noqa: F401
    spectral_decompose as spectral_decompose,
)

__version__ = "0.1.0"
