"""News-driven macro sentiment indices, direction classifiers, and a cost-aware
walk-forward backtest with exact tree-ensemble attributions."""

from .backtest import (
    BacktestReport,
    BootstrapInterval,
    DailyStrategyRecord,
    ModelSpec,
    PerfMetrics,
    block_bootstrap_ci,
    net_strategy_returns,
    perf_metrics,
    positions_from_proba,
    run_backtest,
)
from .errors import BacktestError, DataError
from .explain import ShapMatrix, exact_shapley, linear_contributions, shap_global_ranking, tree_shap
from .features import (
    FEATURE_NAMES,
    FeatureMatrix,
    ZScoreScaler,
    align_trading_days,
    build_feature_matrix,
    merge_calendar,
)
from .ingest import (
    EventRecord,
    HeadlineRecord,
    HeadlineStore,
    filter_macro_events,
    parse_events,
    resolve_headlines,
    select_top_daily,
)
from .market import (
    DirectionLabel,
    PriceBar,
    ReturnPoint,
    direction_labels,
    load_prices,
    log_returns,
    realized_vol,
)
from .models import (
    BoostedTreesClassifier,
    LogisticClassifier,
    load_model,
    logloss,
    save_model,
    train_gbt,
    train_logistic,
)
from .sentiment import (
    ClassProbs,
    DailySentiment,
    ScoredHeadline,
    aggregate_daily,
    lexicon_score,
    load_headline_scores,
    polarity,
)
from .splits import Fold, expanding_splits

__version__ = "0.1.0"
