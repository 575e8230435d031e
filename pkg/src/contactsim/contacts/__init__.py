from .generation import BodyShape, assign_roles, generate_contacts
from .reduction import (
    candidates_csv,
    equivalent_system_check,
    patches_csv,
    patches_from_contacts,
    reduce_contacts,
)
from .types import CollisionPairing, Contact, ContactPatch, ContactSet, ReductionParams

__all__ = [
    "Contact",
    "ContactSet",
    "ContactPatch",
    "ReductionParams",
    "CollisionPairing",
    "BodyShape",
    "assign_roles",
    "generate_contacts",
    "reduce_contacts",
    "patches_from_contacts",
    "equivalent_system_check",
    "candidates_csv",
    "patches_csv",
]
