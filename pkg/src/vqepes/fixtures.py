"""Paths to the bundled water STO-3G integral fixtures.

All fixtures were produced offline by tools/make_fixtures.py (restricted
Hartree-Fock in the STO-3G basis) and are shipped as package data. The
reference geometry is the experimental one, bond angle 104.5 degrees and
O-H length 0.945 Angstrom.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

REFERENCE_ANGLE = 104.5
REFERENCE_LENGTH = 0.945


def data_dir() -> Path:
    return Path(str(resources.files("vqepes") / "data" / "h2o_sto3g"))


def reference_fcidump() -> Path:
    """Full 7-orbital FCIDUMP at the reference geometry."""
    return data_dir() / "reference.fcidump"


def angle_scan_manifest() -> Path:
    """21 geometries, bond angle 85..125 degrees in steps of 2, fixed length."""
    return data_dir() / "angle_scan.manifest"


def grid_manifest() -> Path:
    """7x7 (angle x length) grid for surface fitting."""
    return data_dir() / "grid2d.manifest"
