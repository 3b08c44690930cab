import pathlib
import shutil
import subprocess

import pytest

TOOLS_DIR = pathlib.Path(__file__).resolve().parents[1]
REPO_DIR = TOOLS_DIR.parent


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    """Assemble a full plot-input directory from the main package's CLI output
    and the committed fixtures."""
    target = tmp_path_factory.mktemp("plotdata")
    shutil.copy(TOOLS_DIR / "data" / "mlkem_sizes.csv", target / "mlkem_sizes.csv")
    shutil.copy(REPO_DIR / "data" / "estimates" / "reference.records",
                target / "reference.records")
    params = subprocess.run(["kyfrog", "params"], capture_output=True, text=True,
                            check=True)
    (target / "params.txt").write_text(params.stdout)
    logs = sorted(str(p) for p in (REPO_DIR / "data" / "hunter_logs").glob("run*.log"))
    subprocess.run(["kyfrog", "summarize", *logs,
                    "--runs-csv-out", str(target / "runs.csv")],
                   capture_output=True, text=True, check=True)
    return target
