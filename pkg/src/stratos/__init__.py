"""stratos: ABCD product-portfolio stratification engine.

Classify portfolios into four priority classes by cumulative revenue share,
run multi-pass hierarchy-aware stratification, score slice concentration,
and derive revenue thresholds from blended productivity. Ships as an
embeddable core, a batch CLI (`stratos`), and an HTTP calibration service.
"""

__version__ = "0.1.0"

from .classifier import (
    ClassAssignment,
    CumulativeShares,
    classify,
    classify_snapshot,
    cumulative_shares,
    renormalize_thresholds,
)
from .concentration import (
    ConcentrationIndex,
    EMPTY_POLICY,
    HPolicy,
    ILLUSTRATIVE_POLICY,
    ImpactRow,
    PolicyStep,
    effective_t_a,
    hhi,
    hhi_bounds,
    hhi_report,
    simulate_threshold_impact,
)
from .errors import (
    DegenerateRenormalization,
    DuplicateItem,
    EmptyPortfolio,
    InvalidPolicy,
    NegativeValue,
    ParseError,
    PortfolioError,
    SchemaError,
    UnknownDimension,
    ZeroTotal,
)
from .model import (
    ClassLabel,
    DEFAULT_NEW_CUTOFF_MONTHS,
    DEFAULT_THRESHOLDS,
    Item,
    PortfolioSnapshot,
    SHARE_TOLERANCE,
    SliceKey,
    Thresholds,
    build_snapshot,
    slice_portfolio,
)
from .productivity import (
    BlendCurve,
    BlendSpec,
    ProductivityCurve,
    blend_curve,
    optimal_blend_point,
    productivity_curve,
    solve_t_a,
)
from .segmentation import (
    ItemOutcome,
    PassOutcome,
    PassSpec,
    Stage2Outcome,
    StratificationResult,
    StratifyConfig,
    default_config,
    is_underrepresented,
    run_pass,
    stratify,
)

__all__ = [
    "__version__",
    # model
    "Item",
    "PortfolioSnapshot",
    "ClassLabel",
    "Thresholds",
    "SliceKey",
    "build_snapshot",
    "slice_portfolio",
    "DEFAULT_THRESHOLDS",
    "DEFAULT_NEW_CUTOFF_MONTHS",
    "SHARE_TOLERANCE",
    # classifier
    "CumulativeShares",
    "ClassAssignment",
    "cumulative_shares",
    "classify",
    "classify_snapshot",
    "renormalize_thresholds",
    # segmentation
    "PassSpec",
    "StratifyConfig",
    "StratificationResult",
    "ItemOutcome",
    "PassOutcome",
    "Stage2Outcome",
    "default_config",
    "is_underrepresented",
    "run_pass",
    "stratify",
    # concentration
    "ConcentrationIndex",
    "HPolicy",
    "PolicyStep",
    "ImpactRow",
    "EMPTY_POLICY",
    "ILLUSTRATIVE_POLICY",
    "hhi",
    "hhi_bounds",
    "hhi_report",
    "effective_t_a",
    "simulate_threshold_impact",
    # productivity
    "ProductivityCurve",
    "BlendSpec",
    "BlendCurve",
    "productivity_curve",
    "blend_curve",
    "optimal_blend_point",
    "solve_t_a",
    # errors
    "PortfolioError",
    "EmptyPortfolio",
    "DuplicateItem",
    "NegativeValue",
    "ZeroTotal",
    "UnknownDimension",
    "DegenerateRenormalization",
    "InvalidPolicy",
    "ParseError",
    "SchemaError",
]
