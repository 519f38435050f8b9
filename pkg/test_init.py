import json
from pathlib import Path

import init
import utils


def test_writes_default_config_once(tmp_path: Path) -> None:
    path = tmp_path / "motsteen" / "config.json"
    assert init.main(path) == 0
    written = json.loads(path.read_text())
    assert written == utils.DEFAULT_CONFIG
    utils.validate_config(written)
    assert init.main(path) == 1
    assert json.loads(path.read_text()) == written
