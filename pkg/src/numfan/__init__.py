"""Statistical fans and numerical statistical fans of (noisy) designs."""
from .design import (Design, EmpiricalDesign, check_separation, derivative_matrix, design_matrix,
                     eval_term, load_design, standardize)
from .dependence import DependenceVerdict, fassino_bounds, is_num_independent
from .fans import (Fan, NbmOutput, NumericalFanResult, filter_inclusion_maximal,
                   maximal_stable_order_ideal, nbm, numerical_algebraic_fan_family,
                   numerical_fan, statistical_fan)
from .linalg import (EliminationState, LeastSquaresResult, RankCertificate, condition_number,
                     exact_rank_extend, least_squares)
from .terms import (BudgetExceeded, OrderIdeal, TermOrder, canonical_key, corner_set_after_add,
                    count_order_ideals, divides, format_term, maximal_elements)

__version__ = "0.1.0"
