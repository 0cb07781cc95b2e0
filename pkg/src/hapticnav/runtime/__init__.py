from .bench import LatencyReport, benchmark
from .config import PipelineConfig, load_config, save_config
from .experiment import run_experiment, write_experiment
from .pipeline import build_perception, execute_run, run_pipeline

__all__ = [
    "LatencyReport",
    "PipelineConfig",
    "benchmark",
    "build_perception",
    "execute_run",
    "load_config",
    "run_experiment",
    "run_pipeline",
    "save_config",
    "write_experiment",
]
