"""Blaschke products on the Riemann sphere: evaluation, fibers, critical
points, fundamental-domain boundaries, covering groups, and deterministic
domain-colored rendering."""

from .sphere import INF, ExtComplex, Mobius, as_ext, chordal, is_inf, reciprocal_conj
from .products import (
    BlaschkeProduct,
    PartialInfinite,
    Rotational,
    SinglePower,
    TwoRings,
    TwoZeros,
    build,
    cube_cluster_zeros,
)
from .critical import (
    CriticalSet,
    critical_general,
    critical_two_rings_aligned,
    critical_two_rings_general,
    critical_two_zeros,
)
from .covering import (
    CoverGroup,
    group_single_power,
    group_two_rings_aligned,
    group_two_rings_general,
    group_two_zeros,
)
from .domains import (
    ParamCurve,
    boundaries_by_continuation,
    boundaries_rotational,
    boundaries_single_power,
    boundaries_two_rings_aligned,
    boundaries_two_zeros,
)
from .fibers import (
    AnnulusSpec,
    FiberSolution,
    annulus_preimage,
    fiber,
    fiber_generic,
    fiber_rotational,
    fiber_single_power,
    fiber_two_rings,
    fiber_two_zeros,
)
from .raster import (
    AnnulusScheme,
    MeshSpec,
    RasterScene,
    color_of,
    default_scheme,
    render,
    write_png,
    write_ppm,
)

__version__ = "0.1.0"
