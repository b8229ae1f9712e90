"""cubitab: cubic number fields by discriminant.

Tabulation via reduced binary cubic forms, genus-theory class number
lower bounds, CRT progression certificates, discriminant densities in
arithmetic progressions, and Maier-matrix experiments over them.
"""

from .arith import (
    Factorization,
    crt,
    factorize,
    find_prime,
    is_fundamental_discriminant,
    is_prime,
    kronecker,
)
from .errors import (
    CapacityError,
    CubitabError,
    DomainError,
    InternalInconsistencyError,
    TableParseError,
    UnsupportedModulusError,
    ZeroDensityError,
)
from .forms import (
    CubicForm,
    UnimodularMap,
    act,
    disc,
    hessian,
    is_irreducible,
    is_p_maximal,
    orbit_equivalent,
    orbit_search,
    reduce_form,
)
from .tabulate import (
    FieldRecord,
    FieldTable,
    count,
    count_progression,
    cross_check,
    enumerate_fields,
    import_table,
    multiplicity,
    read_table,
    write_table,
)
from .discshape import DiscShape, decompose, is_galois_disc, totally_ramified_primes
from .genus import GenusData, class_number_lower_bound, genus_number, ramified_qr_count
from .progression import (
    ProgressionCertificate,
    SettingParams,
    construct_setting,
    guarantee_check,
    verify_certificate,
)
from .density import (
    DensityValue,
    density,
    density_lower_bound,
    local_density,
    predict_count,
    setting_density_check,
)
from .maier import MaierReport, build_matrix, multiplicity_profile, pipeline_check

__version__ = "0.1.0"
