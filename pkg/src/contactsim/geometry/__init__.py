from .broadphase import aabb_of_points, broadphase_pairs
from .massprops import MassProperties, mass_properties
from .mesh import TriMesh, export_obj, load_obj
from .shapes import make_box, make_cylinder, make_icosphere, make_torus
from .threads import (
    ISO_COARSE_PITCH,
    ISO_NOMINAL_DIAMETER,
    ISO_NUT_BOLT_CLEARANCE,
    ISO_PEG_HOLE_CLEARANCE,
    ThreadSpec,
    bolt_thread_base_z,
    generate_iso_thread,
    generate_peg_hole,
    thread_profile_radius,
)

__all__ = [
    "TriMesh",
    "load_obj",
    "export_obj",
    "MassProperties",
    "mass_properties",
    "broadphase_pairs",
    "aabb_of_points",
    "make_box",
    "make_icosphere",
    "make_cylinder",
    "make_torus",
    "ThreadSpec",
    "bolt_thread_base_z",
    "generate_iso_thread",
    "generate_peg_hole",
    "thread_profile_radius",
    "ISO_COARSE_PITCH",
    "ISO_NOMINAL_DIAMETER",
    "ISO_NUT_BOLT_CLEARANCE",
    "ISO_PEG_HOLE_CLEARANCE",
]
