"""Exact and approximate matrix multiplication via abelian-group convolutions."""

from .groups import AbelianGroup, ContractError, Signal, Spectrum
from .transforms import convolve, fft, ifft
from .constructions import (IndexingTriplet, StppFamily, ap_triplet, cksu_stpp,
                            vanilla_tpp, verify_stpp, verify_tpp)
from .exact import (BlockingScheme, blocked_multiply, exponent_calculator,
                    naive_multiply, stpp_batch_multiply, threshold_calculator)
from .approx import (PolyFormRandomness, SketchSpec, TruncationPlan, jl_sketch_mm,
                     polyform, sketch_and_solve, stpp_truncated_pair,
                     stpp_truncated_square, tpp_truncated)
from .analysis import (CollisionReport, DistributionSpec, atpq_count, best_rank_r,
                       error_metrics, rank_diagnostics)
from .bench import ExperimentConfig, TrialRecord, emit, run_experiment

__version__ = "0.1.0"
