"""suncolor: exact SU(N) colour algebra in trace-basis normal form.

The package reduces birdtrack-style tensor expressions over quark and gluon
lines to a canonical trace basis with coefficients in Q(N, T_R), constructs
Young and Hermitian Young operators, orthogonal multiplet bases, and checks
everything against a brute-force numeric contraction oracle.
"""

from .coeff import (
    RF_N,
    RF_ONE,
    RF_TR,
    RF_ZERO,
    RationalFunction,
    casimir_adjoint,
    casimir_fundamental,
)
from .errors import (
    ConnectorNotFoundError,
    DegreeMismatchError,
    EngineError,
    OrientationError,
    ParseError,
    PoleError,
    ResourceLimitError,
    SignatureMismatchError,
    VerificationError,
)
from .multiplet import (
    BasisReport,
    BasisVector,
    gluon_projectors_AA,
    gram_matrix,
    quark_multiplet_basis,
    trace_basis,
    transition_operators,
    vbarv_aa_multiplet_basis,
    verify_basis,
)
from .perm import AlgebraElement, Permutation, antisymmetriser, parse_cycles, symmetriser
from .rewrite import (
    Limits,
    NormalForm,
    Wiring,
    eliminate_fd,
    expand_bars,
    fierz_reduce,
    inner_product,
    normal_form,
)
from .tableaux import (
    MultipletCount,
    YoungDiagram,
    YoungTableau,
    decompose_adjoint_power,
    first_occurrence,
    lr_multiply,
    standard_tableaux,
    sun_trim,
)
from .tensor import TensorExpr, parse_expression
from .vec3 import Eps3Expr, eval3, parse_eps, reduce_eps
from .young import YoungOperator, hermitian_young, young_operator

__version__ = "0.1.0"
