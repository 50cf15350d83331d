"""Model persistence and CSV exports."""

from src.storage.exports import (
    write_eigen_table,
    write_eigenform_table,
    write_forecast,
    write_point_table,
    write_trajectory,
)
from src.storage.model_store import ModelDocument, load_model, save_model

__all__ = [
    "ModelDocument",
    "load_model",
    "save_model",
    "write_eigen_table",
    "write_eigenform_table",
    "write_forecast",
    "write_point_table",
    "write_trajectory",
]
