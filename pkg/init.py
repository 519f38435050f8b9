#!/usr/bin/env python3

import json
import os
import sys
from pathlib import Path
from typing import Optional

import utils


def main(path: Optional[Path] = None) -> int:
    path = path or utils.DEFAULT_CONFIG_PATH
    print(f"Creating default {path}...")

    if path.exists():
        print(f"{path} already exists! Aborting to prevent overriding data...")
        return 1

    config = utils.NestedNamespace(utils.DEFAULT_CONFIG)
    utils.validate_config(config)

    print("Saving config...")
    os.makedirs(path.parent, exist_ok=True)
    with open(path, "w") as f:
        json.dump(config.asdict(), f, indent=4)

    print("Done!")
    return 0


if __name__ == "__main__":
    sys.exit(main(Path(sys.argv[1]) if len(sys.argv) > 1 else None))
