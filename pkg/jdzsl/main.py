#!/usr/bin/env python
"""
Entry point for the jdzsl command-line tool

Assembles all components using dependency injection (DI)
and runs one subcommand.

Exit codes: 0 success, 1 usage error, 2 data validation error,
3 numerical failure.
"""
import logging
import os
import sys
from typing import List, Optional

from adapters.input.cli import CommandLineAdapter, parse_args
from domain.errors import DataValidationError, NumericalError, UsageError
from infrastructure.config.config_loader import ConfigLoader
from infrastructure.storage.model_repository import ModelRepository

logging.basicConfig(
    level=logging.DEBUG if os.environ.get('DEBUG') else logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class Application:
    """Application management class for the entire system"""

    def __init__(self, stdout=None):
        self.stdout = stdout
        self.config_loader: Optional[ConfigLoader] = None
        self.model_repository: Optional[ModelRepository] = None
        self.cli_adapter: Optional[CommandLineAdapter] = None

    def setup(self, config_path: Optional[str] = None) -> None:
        logger.debug("Setting up application components...")

        # 1. Load configuration
        self.config_loader = ConfigLoader(config_path)

        # 2. Infrastructure
        self.model_repository = ModelRepository()

        # 3. Adapters
        self.cli_adapter = CommandLineAdapter(self.config_loader, self.model_repository, stdout=self.stdout)
        logger.debug("Setup complete")

    def _configure_logging(self, level_name: Optional[str]) -> None:
        if os.environ.get('DEBUG'):
            return
        level_name = (level_name or self.config_loader.get("logging.level", "INFO")).upper()
        level = logging.getLevelName(level_name)
        if not isinstance(level, int):
            raise UsageError(f"Unknown log level: {level_name}")
        logging.getLogger().setLevel(level)

    def run(self, argv: Optional[List[str]] = None) -> int:
        """Parse arguments, run the command and map failures onto exit codes"""
        try:
            args = parse_args(argv)
            self.setup(args.config)
            self._configure_logging(args.log_level)
            self.cli_adapter.apply_overrides(args)
            return self.cli_adapter.dispatch(args)
        except UsageError as e:
            logger.error("%s", e)
            return EXIT_USAGE
        except DataValidationError as e:
            logger.error("Invalid input: %s", e)
            return EXIT_DATA
        except NumericalError as e:
            logger.error("Numerical failure: %s", e)
            return EXIT_NUMERICAL


def main(argv: Optional[List[str]] = None) -> int:
    app = Application()
    return app.run(argv)


if __name__ == "__main__":
    sys.exit(main())
