"""
Base class for the toolkit's management commands.
"""
import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from django.conf import settings
from django.core.management.base import BaseCommand

from .exceptions import SeafarmError

logger = logging.getLogger(__name__)

ERROR_EXIT_CODE = 2


class ToolkitCommand(BaseCommand):
    """
    Thin wrapper over a module operation.

    Subclasses implement ``run``. Toolkit errors and missing files are written
    to stderr as a JSON error report and end the process with exit status 2.
    """

    def add_seed_argument(self, parser) -> None:
        parser.add_argument('--seed', type=int, default=settings.SEAFARM_DEFAULT_SEED,
                            help='RNG seed; identical seeds give identical outputs')

    def add_output_argument(self, parser) -> None:
        parser.add_argument('--out', type=Path, default=None,
                            help='Output directory (default: $SEAFARM_OUTPUT_DIR)')

    def add_jobs_argument(self, parser) -> None:
        parser.add_argument('--jobs', type=int, default=settings.SEAFARM_JOBS,
                            help='Maximum number of images processed concurrently')

    def add_profile_arguments(self, parser) -> None:
        from datasets.profiles import PROFILES

        parser.add_argument('--profile', choices=sorted(PROFILES), default=None,
                            help='Preload category list and count defaults of a known dataset')
        parser.add_argument('--scale', type=float, default=1.0,
                            help='Multiply profile image count and totals (rounded half up)')

    def output_dir(self, options: Dict[str, Any]) -> Path:
        out: Optional[Path] = options.get('out')
        path = Path(out) if out is not None else Path(settings.SEAFARM_OUTPUT_DIR)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def emit(self, payload: Dict[str, Any]) -> None:
        self.stdout.write(json.dumps(payload, indent=2, sort_keys=True))

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except SeafarmError as exc:
            logger.error(f"{self.__class__.__module__}: {exc.message}")
            self._fail(exc.to_dict())
        except FileNotFoundError as exc:
            logger.error(f"{self.__class__.__module__}: missing file {exc.filename}")
            self._fail({
                'code': 'missing_file',
                'message': f"File not found: {exc.filename}",
                'path': str(exc.filename),
            })

    def _fail(self, error: Dict[str, Any]) -> None:
        self.stderr.write(json.dumps({'status': 'error', 'error': error}, sort_keys=True))
        raise SystemExit(ERROR_EXIT_CODE)

    def run(self, **options) -> None:
        raise NotImplementedError


def counts_argument(value: str) -> Dict[str, int]:
    """argparse type for ``'{"seaurchin": 1000, ...}'`` or ``seaurchin=1000,scallop=35``."""
    value = value.strip()
    try:
        if value.startswith('{'):
            parsed = json.loads(value)
        else:
            parsed = dict(item.split('=', 1) for item in value.split(',') if item)
        return {str(name): int(count) for name, count in parsed.items()}
    except (ValueError, AttributeError) as exc:
        raise argparse.ArgumentTypeError(f"Invalid counts '{value}': {exc}") from exc
