"""Fixed point formulas for intersection pairings on moduli spaces of flat
connections over surfaces, evaluated as regularized sums over dominant weights."""
from .deformation import BetaSpec, DeformedP, Handle, InvariantPoly, det_half_pp, grad, hess, rtilde, solve_xi
from .engine import (
    PairingResult,
    PairingSpec,
    Summation,
    conjugacy_fourier_term,
    double_fourier_term,
    fusion_product_check,
    pairing_term,
    sum_pairing,
)
from .lie import (
    RootSystem,
    RootSystemError,
    WeightVector,
    WeylElement,
    build_root_system,
    coset_representatives,
    dominant_weights_in_ball,
    lattice_covolume,
    weyl_group,
)
from .numeric import working_precision
from .series import GeneratorTable, SeriesMatrix, SuperSeries
from .volumes import (
    Marking,
    char_value,
    make_marking,
    vol_coadjoint_orbit,
    vol_conjugacy_class,
    vol_G,
    vol_G_over_K,
    vol_G_over_T,
    weyl_dim,
)

__version__ = "0.1.0"
