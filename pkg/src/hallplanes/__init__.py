"""Hall planes of order q^2 and Pappus-type configuration questions.

Modules:

* ``coordsys``: prime-power fields, the Hall quasifield and its field twin
* ``plane``: the projective completion with dense incidence, join and meet tables
* ``collineations``: translations, autotopisms, linear maps and canonical line pairs
* ``configs``: the Pappus predicate, the k+m questions and Desargues witnesses
* ``constructions``: parameter sweeps of explicit Pappus constructions
* ``cli``: the ``hallplanes`` command
"""

__version__ = "0.1.0"

from .coordsys import HallSystem, QuadraticExtension, build_field
from .plane import PlaneTables, build_plane


def hall_plane(p: int, k: int = 1, r: int | None = None, s: int | None = None) -> PlaneTables:
    """The Hall plane over F_{p^k}."""
    return build_plane(HallSystem(build_field(p, k), r, s))


def field_plane(p: int, k: int = 1, r: int | None = None, s: int | None = None) -> PlaneTables:
    """The Desarguesian plane of the same order, in the same coordinates."""
    return build_plane(QuadraticExtension(build_field(p, k), r, s))


__all__ = ["__version__", "hall_plane", "field_plane", "build_field", "build_plane", "HallSystem",
           "QuadraticExtension", "PlaneTables"]
