"""Word metrics on Z^d: limit shapes, cone measure, growth and sprawl."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .lattice import (  # noqa: F401
    ConeMeasure,
    Facet,
    GeneratorSet,
    LimitShape,
    build_hull,
    cone_measure,
    count_lattice_points,
    ehrhart_fit,
    minkowski_norm,
    picks_identity,
    sample_cone_measure,
    sector_of,
)
from .metric import (  # noqa: F401
    MetricTable,
    SpellingWitness,
    Unreachable,
    bfs_ball,
    compute_K,
    has_simple_spelling,
    hausdorff_gap,
    simple_spelling,
    tiling_check,
    verify_norm_bounds,
    word_length_oracle,
)
from .presets import preset  # noqa: F401
