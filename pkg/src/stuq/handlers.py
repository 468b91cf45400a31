"""Command handlers for the stuq CLI."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Callable, Mapping, Optional

from stuq.config import ExperimentConfig, parse_int_list
from stuq.core.errors import ConfigError
from stuq.services.datasets import write_dataset
from stuq.services.experiment import build_dataset, run_experiment, train_point_model
from stuq.services.oracles import format_report, run_oracles
from stuq.services.plot_data import emit_plot_data
from stuq.services.results_store import ResultsRecord, ResultsStore
from stuq.services.sweep import sample_complexity_sweep

logger = logging.getLogger(__name__)

Output = Callable[[str], None]


class CommandHandlers:
    """One method per subcommand; each returns the process exit code."""

    def __init__(self, environ: Optional[Mapping[str, str]] = None, output: Output = print):
        """Initialize handlers.

        Args:
            environ: Environment for ``STUQ_*`` overrides (defaults to os.environ)
            output: Where human-readable summaries go
        """
        self.environ = environ
        self.output = output

    def load_config(self, args: argparse.Namespace) -> ExperimentConfig:
        """Preset file, then environment, then CLI flags."""
        config = ExperimentConfig.from_env(getattr(args, "config", None), self.environ)
        samples = getattr(args, "samples", None)
        config = config.with_overrides(
            seed=getattr(args, "seed", None),
            method=getattr(args, "method", None),
            rho=getattr(args, "rho", None),
            out_dir=getattr(args, "out", None),
            sweep_counts=parse_int_list(samples) if samples else None,
        )
        logger.info(f"Configuration loaded: method {config.method.value}, seed {config.seed}, rho {config.rho}")
        return config

    def _store(self, config: ExperimentConfig) -> ResultsStore:
        return ResultsStore.from_env(config.out_dir)

    def _report(self, record: ResultsRecord, store: ResultsStore) -> None:
        overall = record.overall
        line = f"{record.run_id}: MAE {overall.mae:.4f} RMSE {overall.rmse:.4f}"
        if overall.mis is not None:
            line += f" MIS {overall.mis:.4f} width {overall.width:.4f} coverage {overall.coverage:.3f}"
        self.output(line)
        self.output(f"results: {store.run_dir(record.run_id)}")

    def synth(self, args: argparse.Namespace) -> int:
        """Generate the configured synthetic dataset and write it as CSV."""
        config = self.load_config(args)
        if config.data.generator is None:
            raise ConfigError("synth needs DATA_GENERATOR in the preset or environment")
        dataset = build_dataset(config)
        paths = write_dataset(dataset, Path(config.out_dir))
        for name, path in paths.items():
            self.output(f"{name}: {path}")
        return 0

    def train(self, args: argparse.Namespace) -> int:
        """Train and checkpoint a point forecaster."""
        config = self.load_config(args)
        store = self._store(config)
        self._report(train_point_model(config, store), store)
        return 0

    def run(self, args: argparse.Namespace) -> int:
        """Run one UQ method end to end."""
        config = self.load_config(args)
        store = self._store(config)
        self._report(run_experiment(config, store), store)
        return 0

    def sweep(self, args: argparse.Namespace) -> int:
        """MIS against sample count over several seeds."""
        config = self.load_config(args)
        table = sample_complexity_sweep(config)
        path = table.save(Path(config.out_dir) / f"sweep-{config.method.value}-s{config.seed}" / "sweep.json")
        for count, mean in table.means().items():
            self.output(f"S={count}: mean MIS {mean:.4f} over {len(table.seeds)} seeds")
        counts = table.counts
        if len(counts) > 1:
            improved = table.improved_seeds(counts[0], counts[-1])
            self.output(f"{improved}/{len(table.seeds)} seeds improve from S={counts[0]} to S={counts[-1]}")
        self.output(f"sweep: {path}")
        return 0

    def plot_data(self, args: argparse.Namespace) -> int:
        """Write a plot-ready CSV from stored results."""
        path = emit_plot_data(args.sources, args.kind, args.out, window=args.window, feature=args.feature)
        self.output(f"plot data: {path}")
        return 0

    def oracle(self, args: argparse.Namespace) -> int:
        """Run the self-check suites; exit 1 when any fails."""
        reports = run_oracles(args.suites or None, seed=args.seed or 0)
        self.output(format_report(reports))
        return 0 if all(r.passed for r in reports) else 1
