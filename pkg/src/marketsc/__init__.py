"""Strategic classification when users buy feature changes in a priced market.

Users who fall on the negative side of a linear classifier can pay to move
to its boundary. A revenue-maximizing seller posts one price per unit of
distance, so which users move depends on budgets as well as features. The
package computes those prices exactly and smoothly, simulates user
responses, and trains classifiers that anticipate the market.
"""

from .analysis import (
    PdfSpec,
    convergence_with_m,
    expected_maximizer,
    expected_revenue,
    price_setter_percentile,
    sensitivity_add_point,
    threshold_sweep,
)
from .core import (
    Dataset,
    DemandProfile,
    LinearClassifier,
    UserRecord,
    demand_all,
    demand_profile,
    demand_units,
    gini,
    predict,
)
from .dataio import load_dataset, rescale_budgets, write_dataset
from .errors import InputError, MarketError
from .evaluation import (
    Metrics,
    evaluate,
    evaluate_short_long,
    long_term_price,
    plain_accuracy,
    social_burden,
    welfare,
)
from .experiment import ExperimentConfig, run_experiment
from .learning import (
    ModelState,
    TrainConfig,
    adam_step,
    hinge,
    m_hinge,
    objective,
    s_hinge,
    train_masc,
    train_naive,
    train_strat,
)
from .pricing import PriceQuote, brute_force_price, exact_price, price_vector, revenue_at, revenue_curve
from .response import MarketOutcome, best_response, least_cost_bundle, simulate_market
from .smooth import SmoothPriceConfig, smooth_price, smooth_price_gradient, soft_sort
from .synthetic import ScenarioSpec, generate

__version__ = "0.1.0"
