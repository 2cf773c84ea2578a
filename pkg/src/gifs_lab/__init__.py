"""Balanced Cantor-type sets, iterated function systems of infinite order,
and the checks that tie them together."""

from .addresses import (ArityProfile, IndexingFunction, build_indexing_function,
                        digit_transform, enumerate_addresses, read_window)
from .appendix import (EMPTY, appendix_distance, build_example_space,
                       discontinuity_witness, retract, witness_set)
from .balanced import (CellTree, InfeasibleLayout, NotInSet, addresses_of,
                       build_balanced_set, materialize_net, verify_conditions)
from .extension import (ExtendedMap, SampledMap, estimate_lipschitz, extend_system,
                        mcshane_extend, mcshane_extend_many)
from .measure import GaugeFunction, cell_cover, interval_cover, premeasure_upper
from .metric import (BoundedSeq, CompactNet, hausdorff_distance, seq_metric,
                     set_distance)
from .systems import (AddressMap, GifsInfSystem, GifsSystem, IfsSystem, TupleExplosion,
                      hutchinson_step, hutchinson_step_gifs, hutchinson_step_ifs,
                      hutchinson_step_inf, iterate_to_fixed_point)
from .witness import (build_refined_system, build_union_system, build_witness_system,
                      certify_lipschitz, check_image_characterization)

__version__ = "0.1.0"
