import io
import json

import numpy as np
import pytest
from django.core.management import call_command

from datasets.tests.samples import draw_dataset


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def dataset(tmp_path):
    """(manifest path, manifest) of a four-image dataset with one box per category."""
    return draw_dataset(tmp_path / 'source')


@pytest.fixture
def output_dir(tmp_path, settings):
    path = tmp_path / 'output'
    settings.SEAFARM_OUTPUT_DIR = path
    return path


@pytest.fixture
def run_command():
    """Call a management command with CLI-style arguments; return its parsed JSON output."""

    def _run(name, *args):
        stdout = io.StringIO()
        call_command(name, *[str(arg) for arg in args], stdout=stdout)
        return json.loads(stdout.getvalue())

    return _run


@pytest.fixture
def failing_command():
    """Call a management command expected to fail; return (exit code, parsed stderr report)."""

    def _run(name, *args):
        stderr = io.StringIO()
        with pytest.raises(SystemExit) as excinfo:
            call_command(name, *[str(arg) for arg in args], stdout=io.StringIO(), stderr=stderr)
        return excinfo.value.code, json.loads(stderr.getvalue())

    return _run
