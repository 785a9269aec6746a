"""henongreen: dynamics of complex Henon maps made computable.

Escape-rate Green functions with certified error bounds, the filtration at
infinity, Boettcher coordinates and their leading constants, classification
of polynomial automorphism words, symbolic identity checks (commutation,
iterate coincidence), and deterministic slice rendering.
"""

from .algebra import (
    ExactComplex,
    MonomialBudgetError,
    Poly1,
    Poly2,
    PolyMap2,
    poly1_eval,
    poly2_compose,
    polymap_compose,
    polymap_equal,
)
from .boettcher import (
    BoettcherConstants,
    BoettcherValue,
    BranchSafetyError,
    OutsideFiltrationError,
    boettcher_minus,
    boettcher_plus,
    green_from_boettcher,
    leading_constant,
)
from .green import (
    BracketingError,
    CertificationError,
    FiltrationRadius,
    GreenValue,
    LevelPoint,
    MultiplierEstimate,
    estimate_multiplier,
    filtration_radius,
    green_clipped,
    green_minus,
    green_plus,
    green_plus_batch,
    growth_constants,
    in_K_plus,
    region_of,
    sample_level_plus,
)
from .kernels import engine_name
from .maps import (
    AffineMap,
    AutoWord,
    ElementaryMap,
    EscapedRangeError,
    HenonFactor,
    HenonMap,
    WordClass,
    affine_power,
    classify_word,
    henon_apply,
    henon_apply_inverse,
    henon_degree,
    henon_inverse_word,
    normalize_affine,
    word_expand,
)
from .mapspec import MapSpecError, parse_map_spec, serialize_map
from .render import (
    GridResult,
    SliceSpec,
    contour_level,
    sample_grid,
    write_image,
)
from .rigidity import (
    CommutationReport,
    FunctorialReport,
    InvarianceReport,
    TwoLevelReport,
    check_affine_form,
    check_commutation_scaled,
    iterate_coincidence,
    two_level_delta,
    verify_functorial,
    verify_invariance,
)

__version__ = "0.1.0"
