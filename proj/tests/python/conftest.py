import os
import shutil
import subprocess

import pytest


@pytest.fixture(scope="session")
def patient_dir(tmp_path_factory):
    tool = os.environ.get("IMHOTEP_MAKE_FIXTURE") or shutil.which("imhotep_make_fixture")
    if not tool:
        pytest.skip("IMHOTEP_MAKE_FIXTURE not set")
    d = tmp_path_factory.mktemp("patient")
    subprocess.run([tool, str(d), "16"], check=True)
    return d
