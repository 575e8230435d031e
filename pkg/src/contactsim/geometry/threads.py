"""Procedural ISO metric threads, pegs, and hole blocks.

The thread boundary is the ISO basic profile: a 60-degree symmetric V of
fundamental height H = sqrt(3)/2 * pitch, truncated to a flat crest of width
pitch/8 at the major diameter and a flat root of width pitch/4 at
major - 5H/4 (diametral). Root fillets are not modeled. Bolts carry the
profile directly; nuts carry it enlarged radially by clearance/2, so the
stated diametral clearance is the two-sided fit between mating parts, and a
zero-clearance nut/bolt pair coincides exactly at the identity pose.

The zero pose of a matching nut/bolt pair is the fully assembled state:
meshes generated from the same spec share the helix phase, so placing both
at the origin threads the nut onto the bolt at the bottom of its travel.

Pitch values come from the ISO 724 coarse-thread series. Nut height (5
turns) and hex width across flats (1.5 x nominal diameter) are package
defaults, not standard values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import TriMesh
from .shapes import annular_solid, polygon_radius, revolve_solid, thetas_with_corners

# ISO 724 coarse series: nominal diameter (m) -> pitch (m).
ISO_COARSE_PITCH = {
    "M4": 0.0007,
    "M8": 0.00125,
    "M12": 0.00175,
    "M16": 0.0020,
    "M20": 0.0025,
}

ISO_NOMINAL_DIAMETER = {"M4": 0.004, "M8": 0.008, "M12": 0.012, "M16": 0.016, "M20": 0.020}

# Diametral nut/bolt clearance range (m): tight/loose ends of the ISO 965
# tolerance band.
ISO_NUT_BOLT_CLEARANCE = {
    "M4": (0.416e-3, 0.736e-3),
    "M8": (0.848e-3, 1.325e-3),
    "M12": (1.26e-3, 1.86e-3),
    "M16": (1.472e-3, 2.127e-3),
    "M20": (1.879e-3, 2.664e-3),
}

# Diametral peg/hole clearance range (m) for round pegs, ISO 286.
ISO_PEG_HOLE_CLEARANCE = {
    0.004: (0.104e-3, 0.112e-3),
    0.008: (0.105e-3, 0.114e-3),
    0.012: (0.206e-3, 0.217e-3),
    0.016: (0.506e-3, 0.517e-3),
}

HEX_WIDTH_FACTOR = 1.5  # width across flats / nominal diameter (package default)
HEAD_HEIGHT_FACTOR = 0.65  # bolt head height / nominal diameter (package default)
DEFAULT_NUT_TURNS = 5
ROWS_PER_TURN_MIN = 16


@dataclass(frozen=True)
class ThreadSpec:
    nominal_diameter: float  # m
    pitch: float  # m
    clearance: float = 0.0  # diametral, m; applied to nuts only
    turns: int = DEFAULT_NUT_TURNS
    segments_per_turn: int = 64
    kind: str = "bolt"  # "nut" | "bolt"

    def __post_init__(self):
        if self.pitch <= 0.0:
            raise ValueError("pitch must be positive")
        if self.clearance < 0.0:
            raise ValueError("clearance must be non-negative")
        if self.turns < 1:
            raise ValueError("turns must be at least 1")
        if self.segments_per_turn < 16:
            raise ValueError("segments_per_turn must be at least 16")
        if self.kind not in ("nut", "bolt"):
            raise ValueError(f"unknown thread kind {self.kind!r}")

    @classmethod
    def standard(
        cls,
        size: str,
        kind: str,
        fit: str = "tight",
        turns: int | None = None,
        segments_per_turn: int = 64,
    ) -> "ThreadSpec":
        if size not in ISO_COARSE_PITCH:
            raise ValueError(f"unknown metric size {size!r}")
        tight, loose = ISO_NUT_BOLT_CLEARANCE[size]
        clearance = {"tight": tight, "loose": loose}[fit] if kind == "nut" else 0.0
        return cls(
            nominal_diameter=ISO_NOMINAL_DIAMETER[size],
            pitch=ISO_COARSE_PITCH[size],
            clearance=clearance,
            turns=turns if turns is not None else DEFAULT_NUT_TURNS,
            segments_per_turn=segments_per_turn,
            kind=kind,
        )

    @property
    def major_radius(self) -> float:
        return self.nominal_diameter / 2.0

    @property
    def thread_depth(self) -> float:
        return 5.0 / 8.0 * (np.sqrt(3.0) / 2.0) * self.pitch

    @property
    def minor_radius(self) -> float:
        return self.major_radius - self.thread_depth


def thread_profile_radius(
    thetas: np.ndarray, z: float, diameter: float, pitch: float, radial_offset: float = 0.0
) -> np.ndarray:
    """Boundary radius of the ISO basic profile at height z for each theta.

    The helix phase is u = z - pitch * theta / (2 pi) (right-handed). Bolts
    use radial_offset 0; nuts use +clearance/2.
    """
    p = pitch
    h = np.sqrt(3.0) / 2.0 * p
    r_major = diameter / 2.0
    r_minor = r_major - 5.0 / 8.0 * h
    u = np.mod(z - p * thetas / (2.0 * np.pi), p)
    a = np.minimum(u, p - u)  # axial distance to nearest crest center
    flank = r_major - (a - p / 16.0) * np.sqrt(3.0)
    r = np.where(a <= p / 16.0, r_major, np.where(a >= 3.0 * p / 8.0, r_minor, flank))
    return r + radial_offset


def generate_iso_thread(spec: ThreadSpec) -> TriMesh:
    """Watertight helical thread mesh: bolt with hex head and cylindrical
    shank, or nut with hex outer body."""
    if spec.kind == "bolt":
        return _generate_bolt(spec)
    return _generate_nut(spec)


def _thread_rows(spec: ThreadSpec, thetas: np.ndarray, z0: float, z1: float, offset: float):
    rows_per_turn = max(ROWS_PER_TURN_MIN, spec.segments_per_turn // 4)
    n_rows = int(round((z1 - z0) / spec.pitch * rows_per_turn))
    zs = np.linspace(z0, z1, n_rows + 1)
    return [
        (float(z), thread_profile_radius(thetas, float(z), spec.nominal_diameter, spec.pitch, offset))
        for z in zs
    ]


def bolt_thread_base_z(spec: ThreadSpec) -> float:
    """Height where the bolt thread starts: head + shank, snapped up to a
    whole number of pitches so a nut translated there stays phase-aligned."""
    raw = (HEAD_HEIGHT_FACTOR + 0.5) * spec.nominal_diameter
    return np.ceil(raw / spec.pitch) * spec.pitch


def _generate_bolt(spec: ThreadSpec) -> TriMesh:
    d = spec.nominal_diameter
    thetas = thetas_with_corners(spec.segments_per_turn, sides=6)
    hex_r = polygon_radius(thetas, HEX_WIDTH_FACTOR * d, 6)
    head_h = HEAD_HEIGHT_FACTOR * d
    z_thread0 = bolt_thread_base_z(spec)
    z_top = z_thread0 + spec.turns * spec.pitch
    shank_r = np.full(len(thetas), spec.major_radius)

    rows = [
        (0.0, hex_r),
        (head_h, hex_r),
        (head_h, shank_r),  # annular step down from the head
        (z_thread0, shank_r),
    ]
    rows += _thread_rows(spec, thetas, z_thread0, z_top, 0.0)[1:]
    return revolve_solid(thetas, rows)


def _generate_nut(spec: ThreadSpec) -> TriMesh:
    d = spec.nominal_diameter
    thetas = thetas_with_corners(spec.segments_per_turn, sides=6)
    height = spec.turns * spec.pitch
    inner_rows = _thread_rows(spec, thetas, 0.0, height, spec.clearance / 2.0)
    hex_r = polygon_radius(thetas, HEX_WIDTH_FACTOR * d, 6)
    outer_rows = [(0.0, hex_r), (height, hex_r)]
    return annular_solid(thetas, inner_rows, outer_rows)


def generate_peg_hole(
    diameter: float,
    clearance: float,
    length: float,
    segments: int = 32,
    hole_depth: float | None = None,
) -> tuple[TriMesh, TriMesh]:
    """Cylindrical peg plus a square block with a matching through-hole.

    The hole diameter is diameter + clearance (diametral). The block sits on
    z in [0, hole_depth]; the peg spans z in [0, length] when generated.
    """
    if clearance < 0.0:
        raise ValueError("clearance must be non-negative")
    if diameter <= 0.0 or length <= 0.0:
        raise ValueError("diameter and length must be positive")
    depth = hole_depth if hole_depth is not None else 2.0 * length / 3.0

    thetas = thetas_with_corners(segments, sides=4)
    peg_r = np.full(len(thetas), diameter / 2.0)
    n_rows = max(2, int(round(length / (np.pi * diameter / segments))))
    peg_rows = [(float(z), peg_r) for z in np.linspace(0.0, length, n_rows + 1)]
    peg = revolve_solid(thetas, peg_rows)

    hole_r = np.full(len(thetas), (diameter + clearance) / 2.0)
    block_r = polygon_radius(thetas, 3.0 * diameter, 4)
    hole_rows_n = max(2, int(round(depth / (np.pi * diameter / segments))))
    inner_rows = [(float(z), hole_r) for z in np.linspace(0.0, depth, hole_rows_n + 1)]
    outer_rows = [(0.0, block_r), (depth, block_r)]
    block = annular_solid(thetas, inner_rows, outer_rows)
    return peg, block
