"""Cost-driven hardware/software co-design exploration for tiny authentication models."""

from .archmodel import ArchGraph, ArchSpec, LayerNode, build_arch, default_archs, layer_activation_elems, layer_opcounts, load_archs, param_count
from .bioeval import Embedding, RocCurve, ScoreSet, distance, eer, frr_at_far, fuse, histogram, roc
from .dse import DesignPoint, EvalOptions, MetricVector, ResultsTable, enumerate_space, evaluate, explore, load_results, pareto_front
from .errors import ConfigError, EvaluationError, InfeasibleError, ParseError, SpecError, TinyDSEError
from .footprint import MB, PrecisionScheme, activation_bytes, flash_required_bytes, param_bytes, peak_memory_bytes, size_report
from .hwcatalog import BoardConfig, Part, PartCatalog, Requirements, board_cost, default_catalog, load_catalog, min_board, select_memory_tier
from .perfmodel import LatencyCoeffs, effective_latency, load_coeffs, model_latency, system_latency

__version__ = "0.1.0"
