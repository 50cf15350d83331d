"""Pipeline orchestration."""

from src.pipeline.reconstruction import FitOutcome, FitReport, ReconstructionPipeline

__all__ = ["FitOutcome", "FitReport", "ReconstructionPipeline"]
