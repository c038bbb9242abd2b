"""Minor posets of homomorphisms between finite algebras, computed through natural dualities."""

from .algebra import (
    FiniteAlgebra,
    Hom,
    Signature,
    enumerate_homs,
    identification_map,
    power,
    product,
    tau_power_map,
)
from .duality import (
    AlterEgo,
    DualMap,
    DualSpace,
    alter_ego_boolean,
    alter_ego_dl,
    alter_ego_median,
    alter_ego_mv,
    bidual_check,
    birkhoff_dual,
    canonical_copower_iso,
    dual_of_hom,
    dualize,
)
from .dualspace import (
    Const,
    DualMorphism,
    MinorSequence,
    MorphismClass,
    Pt,
    canonical_class,
    copower,
    enumerate_morphisms,
    maximal_classes,
    minor_sequence,
    principal_ideal,
    termwise_identity,
    tilde_classes,
)
from .errors import MinorkitError
from .posets import Poset, bell, partition_lattice, poset_iso

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
