"""Dataset layout, phantom generation, leave-one-out evaluation, CLI."""

from .dataset import Dataset, DatasetRecord, discover_dataset
from .phantom import PhantomParams, generate_phantom, write_phantom_suite
from .loo import PipelineConfig, run_loo, segment_image
from .report import EvalReport, ReportRow, format_table, report_to_json_dict

__all__ = [
    "Dataset",
    "DatasetRecord",
    "EvalReport",
    "PhantomParams",
    "PipelineConfig",
    "ReportRow",
    "discover_dataset",
    "format_table",
    "generate_phantom",
    "report_to_json_dict",
    "run_loo",
    "segment_image",
    "write_phantom_suite",
]
