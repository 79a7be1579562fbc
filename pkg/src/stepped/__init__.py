"""Exact stepped planes and surfaces, dual maps of free-group morphisms and
Brun expansions of vectors and patches."""

from .brun import (
    BrunStep,
    Convergent,
    Expansion,
    Termination,
    brun_expansion,
    brun_step,
    convergents,
    direction_distance,
    parse_vector,
)
from .dual import (
    DualMap,
    NotBinary,
    apply_dual,
    certified_radius_after,
    dual_image_face,
    dual_image_flip,
    dual_image_plane,
)
from .io import patch_from_dict, patch_to_dict, read_patch, report_to_dict, write_patch
from .patch import (
    INF,
    AgreeUpTo,
    Face,
    FlipSpec,
    InvalidDefectError,
    Patch,
    PlaneSpec,
    QuasiPlaneSpec,
    add,
    distance,
    generate_plane_patch,
    is_binary,
    is_valid_defect,
    make_flip,
    plane_membership,
    quasi_plane_patch,
)
from .recognition import (
    MoveDecision,
    PlanarityReport,
    Run,
    Verdict,
    decide_move,
    find_runs,
    recognize_planarity,
    select_brun_move,
    surface_brun_expansion,
    tilde_T,
)
from .render import RenderConfig, render_svg
from .surface import (
    NonBinaryError,
    SurfaceReport,
    pseudo_flip_decomposition,
    random_valid_flips,
    surface_check_d3,
)
from .words import (
    Morphism,
    MorphismSyntaxError,
    abelianize,
    brun_substitution,
    brun_substitution_inverse,
    compose,
    format_morphism,
    incidence_matrix,
    is_unimodular,
    parse_morphism,
    reduce_word,
)

__version__ = "0.1.0"
