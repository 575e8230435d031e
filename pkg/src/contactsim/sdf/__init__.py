from .grid import (
    CACHE_ENV_VAR,
    SdfResolutionSpec,
    SignedDistanceGrid,
    cached_sdf,
    generate_sdf,
)

__all__ = [
    "SignedDistanceGrid",
    "SdfResolutionSpec",
    "generate_sdf",
    "cached_sdf",
    "CACHE_ENV_VAR",
]
