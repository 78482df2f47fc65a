"""Graph-entropy texture descriptors with level-set segmentation.

Per-pixel patch graphs (Euclidean windows or morphological amoebas, plus
their Dijkstra trees) feed entropy-based graph indices that act as texture
descriptors; a geodesic-active-contour solver segments images driven by
those descriptor maps, and a fractal-analysis module relates the
descriptors to local dimension.
"""

__version__ = "0.1.0"

from .descriptors import (  # noqa: F401
    DescriptorConfig,
    DescriptorMap,
    compute_descriptor_map,
    normalize_map,
    stack_maps,
)
from .entropy import (  # noqa: F401
    IndexKind,
    dehmer_fp,
    dehmer_fv,
    entropy_from_logdensity,
    evaluate_index,
    mean_information_on_distances,
)
from .fractal import (  # noqa: F401
    DimensionCurve,
    SphereGrowthSample,
    aggregate_sphere_growth,
    dimension_curve,
    fit_local_dimension,
    grid_centers,
    sphere_growth,
    unit_sphere_volume,
)
from .gac import (  # noqa: F401
    CircleContour,
    ContourVanishedError,
    EdgeMap,
    GacParams,
    LevelSetField,
    MaskContour,
    RectangleContour,
    edge_map,
    gac_step,
    interior_area,
    jaccard,
    pixel_accuracy,
    reinitialize,
    run_gac,
    signed_distance,
)
from .image import (  # noqa: F401
    Image,
    ImageIOError,
    ShapeMask,
    letter_e_mask,
    load_image,
    save_image,
    synth_compose,
    synth_stripe_noise,
)
from .patchgraph import (  # noqa: F401
    DijkstraTree,
    PatchGraph,
    adaptive_patch_graph,
    all_pairs_distances,
    build_setting,
    dijkstra,
    euclidean_patch_graph,
)
