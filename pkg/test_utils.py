import json
from pathlib import Path

import pytest

import parsers
import utils
from coeff import BaseMode, ContractError


@pytest.fixture(autouse=True)
def no_user_config(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(utils, "DEFAULT_CONFIG_PATH", tmp_path / "absent" / "config.json")


def test_nested_namespace() -> None:
    ns = utils.NestedNamespace({"session": {"prime": 3}, "flat": 1})
    assert ns.session.prime == 3
    assert ns[("session", "prime")] == 3
    assert ns["flat"] == 1
    ns[("verify", "seed")] = 7
    assert ns.verify.seed == 7
    assert ("verify", "seed") in ns
    assert ("verify", "samples") not in ns
    assert ns.asdict() == {"session": {"prime": 3}, "flat": 1, "verify": {"seed": 7}}


def test_default_config_is_valid() -> None:
    utils.validate_config(utils.DEFAULT_CONFIG)


def test_validation_collects_problems() -> None:
    config = utils.NestedNamespace(utils.DEFAULT_CONFIG)
    config[("session", "prime")] = 4
    config[("session", "mode")] = "complex"
    config[("verify", "samples")] = -1
    with pytest.raises(utils.ConfigError) as info:
        utils.validate_config(config)
    message = str(info.value)
    assert "session.prime" in message
    assert "session.mode" in message
    assert "verify.samples" in message


def test_missing_entry() -> None:
    data = json.loads(json.dumps(utils.DEFAULT_CONFIG))
    del data["verify"]["seed"]
    with pytest.raises(utils.ConfigError, match="verify.seed"):
        utils.validate_config(data)


def test_import_config(tmp_path: Path) -> None:
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"session": {"prime": 3, "mode": "rho0"}}))
    config = utils.import_config(path)
    assert config.session.prime == 3
    assert config.session.mode == "rho0"
    assert config.session.truncation == 16
    assert config.config_path == str(path.absolute())


def test_import_config_errors(tmp_path: Path) -> None:
    with pytest.raises(utils.ConfigError):
        utils.import_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(utils.ConfigError):
        utils.import_config(broken)


def test_missing_default_file_is_fine() -> None:
    config = utils.import_config()
    assert config.session.prime == 2


def test_cli_overrides_config(tmp_path: Path) -> None:
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"session": {"prime": 3, "max_d": 20}}))
    config, args = utils.get_config_and_parser(
        argv=["--config", str(path), "--prime", "5", "--samples", "3"]
    )
    assert config.session.prime == 5
    assert config.session.max_d == 20
    assert config.verify.samples == 3
    assert args.config == str(path)


def test_subcommand_parser() -> None:
    parser = parsers.main_parser(utils.EXPECTED_ENTRIES, utils.CHOICES)
    config, args = utils.get_config_and_parser(parser, ["pair", "--mode", "rho0", "t0", "Q0"])
    assert args.sub == "pair"
    assert (args.x, args.theta) == ("t0", "Q0")
    assert config.session.mode == "rho0"


def test_bad_choice_exits() -> None:
    parser = parsers.main_parser(utils.EXPECTED_ENTRIES, utils.CHOICES)
    with pytest.raises(SystemExit):
        utils.get_config_and_parser(parser, ["pair", "--format", "yaml", "t0", "Q0"])


def test_session() -> None:
    config = utils.import_config()
    session = utils.Session.from_config(config)
    assert session.prime == 2
    assert session.mode is BaseMode.GENERIC
    assert session.max_d == 40
    assert utils.Session(prime=3).max_d == 60
    assert utils.Session(prime=3, max_d=10).steenrod().max_d == 10
    assert session.bmu().truncation == 16
    data = session.to_jsonable_dict()
    assert data["mode"] == "generic"
    assert set(data["versions"]) == {"rewriter", "coproduct", "dualization", "margolis"}


def test_session_contract() -> None:
    with pytest.raises(ContractError):
        utils.Session(prime=4)
    with pytest.raises(ContractError):
        utils.Session(crossing="sideways")


def test_mode_help_names_what_char2_kills() -> None:
    desc = next(d for _, path, d in utils.EXPECTED_ENTRIES if path == ("session", "mode"))
    assert "char2 (tau = rho = 0)" in desc
