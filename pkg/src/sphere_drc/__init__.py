"""Exactly-p set-colorings from phases of inner products on complex spheres."""

from .analysis import (RotationTuple, audit_tuple_codegree, centroid_pairing_check, codegree,
                       codegrees, compute_I_set, compute_J_set, compute_K_set, cross_degrees,
                       find_rotation_tuple, isomorphism_check, j_complement_audit,
                       mean_pair_codegree, min_cross_degree, plant_rotated_copy)
from .coloring import (SetColoring, SphereFamily, assign_intra_sphere, build_coloring,
                       build_construction1, build_construction2, color_class, color_family,
                       make_family)
from .drc import DrcParams, drc_rich_subset, rich_subgraph_audit, verify_proposition
from .errors import (ArtifactError, ConstructionError, CorruptArtifact, PreconditionError,
                     ResourceError, UnsupportedVersion)
from .geometry import (PhaseArc, UnitVector, arc_contains, canonical_arg, inner_product,
                       root_of_unity, rotate, sample_uniform)
from .graphs import (SimpleGraph, build_hypercube, build_random_graph, complement,
                     hypercube_density)
from .measure import MeasureEstimate, estimate_cap_measure, estimate_strip_measure
from .partition import EqualAreaPartition, equal_area_partition
from .report import Report

__version__ = "0.1.0"
