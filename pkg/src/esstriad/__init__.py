"""Toolkit for triplets of essential matrices: polynomial compatibility
constraints, synthetic generators, averaging onto the compatible set,
and three-view auto-calibration."""

__version__ = "0.1.0"

from .averaging import AveragingResult, average, optimal_scales
from .autocalib import (CalibrationSolution, CalibSystem,
                        assemble_calib_system, calib_residuals,
                        recover_calibrations, solve_calibration)
from .constraints import (CompatibilityDecision, EssentialTriplet,
                          ResidualReport, SpectralDiagnostics, block_matrix,
                          fundamental_triplet_residuals, is_compatible,
                          residual_vector, spectral_diagnostics)
from .errors import (ChainError, DegenerateAxis, DegenerateInput,
                     EsstriadError, FamilyParamError, NonFiniteValue,
                     NotEssential, RankError, SchemaError)
from .essential import (FactorCandidate, Pose, demazure_residual,
                        epipoles, essential_from_poses, factor_essential,
                        is_rank_two)
from .mat3core import (adjugate, diamond, random_rotation,
                       rotation_from_axis_angle, skew)
from .synthesis import (CameraTriple, ChainWitness, FamilyParams,
                        family_triplet, random_camera_triple,
                        sample_family_params, triplet_from_cameras,
                        verify_chain, witness_for_family, witness_from_chain)

__all__ = [
    "AveragingResult", "CalibSystem", "CalibrationSolution", "CameraTriple",
    "ChainError", "ChainWitness", "CompatibilityDecision", "DegenerateAxis",
    "DegenerateInput", "EssentialTriplet", "FactorCandidate",
    "EsstriadError", "FamilyParamError", "FamilyParams", "NonFiniteValue",
    "NotEssential", "Pose", "RankError", "ResidualReport", "SchemaError",
    "SpectralDiagnostics", "adjugate", "assemble_calib_system", "average",
    "block_matrix", "calib_residuals", "demazure_residual", "diamond",
    "epipoles", "essential_from_poses", "factor_essential",
    "family_triplet", "fundamental_triplet_residuals", "is_compatible",
    "is_rank_two", "optimal_scales", "random_camera_triple",
    "random_rotation", "recover_calibrations", "residual_vector",
    "rotation_from_axis_angle", "sample_family_params", "skew",
    "solve_calibration", "spectral_diagnostics", "triplet_from_cameras",
    "verify_chain", "witness_for_family", "witness_from_chain",
]
