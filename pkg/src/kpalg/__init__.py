"""Exact computer algebra for Kähler-Poisson algebras.

Everything is computed over the rationals.  The lower layers provide
polynomials and localized quotient rings; on top of them sit the Poisson
bracket, the metric construction and the Levi-Civita geometry.
"""

__version__ = "0.1.0"

from .errors import (KPError, NotAUnitError, ParseError, ResourceLimitError, ScopeError,
                     SemanticError, UnknownGeneratorError, VerificationError)
from .poly import GREVLEX, LEX, MonomialOrder, Poly, buchberger, format_poly, parse_poly
from .ring import Elem, RingCtx, make_ctx, normal_form
from .poisson import (BracketTable, CheckResult, bracket, check_relations_central,
                      jacobi_check, level_set_table)
from .skewnf import RingMatrix, adjugate, block_diagonalize, build_metric, eliminate_pair
from .kp import Deriv, KPCtx, coeffs_from_values, d_apply, d_matrix, g_form, kp_verify, trace
from .geometry import (Geometry, christoffel, divergence, gradient, laplacian, lie_bracket,
                       nabla, ricci, riemann, scalar, verify_properties)
from .config import AlgebraConfig, build_algebra, load_config, parse_config
from .fixtures import fixture_names, load_fixture
