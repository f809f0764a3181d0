"""Enumeration and classification of combinatorial 3-spheres and rational 4-polytopes."""
from __future__ import annotations

from pathlib import Path

from .canon import CanonicalKey, Registry, canonical_key
from .chirotope import classify, derive_partial_chirotope, propagate, verify_certificate
from .geometry import RationalPolytope, convex_hull, generate_from_simplex, generate_polytopes, verify_realization
from .lattice import FacetComplex, build_face_poset, check_sphere, f_vector, flag_f_vector, is_sphere
from .lp import LinearSystem, check_witness, solve
from .spheres import enumerate_simplicial, enumerate_spheres, ingest_seeds, untriangulate

__version__ = "0.1.0"

DATA_DIR = Path(__file__).parent / "data"


def data_path(name: str) -> Path:
    """Path of a bundled data file (listed in the project README)."""
    path = DATA_DIR / name
    if not path.exists():
        raise FileNotFoundError(path)
    return path


__all__ = [
    "CanonicalKey",
    "FacetComplex",
    "LinearSystem",
    "RationalPolytope",
    "Registry",
    "build_face_poset",
    "canonical_key",
    "check_sphere",
    "check_witness",
    "classify",
    "convex_hull",
    "data_path",
    "derive_partial_chirotope",
    "enumerate_simplicial",
    "enumerate_spheres",
    "f_vector",
    "flag_f_vector",
    "generate_from_simplex",
    "generate_polytopes",
    "ingest_seeds",
    "is_sphere",
    "propagate",
    "solve",
    "untriangulate",
    "verify_certificate",
    "verify_realization",
]
