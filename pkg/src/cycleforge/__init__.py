"""Exact constructions and finite-field checks for higher Chow cycles on a cuspidal
cyclic cubic fourfold, its Fano variety of lines and an Eisenstein K3 surface."""

from __future__ import annotations

__version__ = "0.1.0"

from .fields import GF, QQ, QQZETA
from .scene import Scene, SceneError, build_scene, canonical_scene, specialize_scene

__all__ = ["GF", "QQ", "QQZETA", "Scene", "SceneError", "build_scene", "canonical_scene", "specialize_scene", "__version__"]
