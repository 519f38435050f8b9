from __future__ import annotations

import argparse
import copy
import json
import logging
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from types import SimpleNamespace
from typing import Any, Optional, Sequence, Union, cast

import parsers
import VERSIONS
from bmu import BmuModule
from coeff import BaseMode, ContractError
from dual import CROSSINGS, DualSteenrod, is_prime
from operations import MotivicSteenrod, default_max_d

DEFAULT_CONFIG_PATH = Path.home() / ".config/motsteen/config.json"

FORMATS = ("text", "json")
MODES = tuple(mode.value for mode in BaseMode)


class Prime(object):
    pass


class Choice(object):
    pass


# fmt: off
# When adding new options, don't forget to also put them in DEFAULT_CONFIG!
EXPECTED_ENTRIES = [
    # Type      Path in config                  Description
    (Prime,     ("session", "prime"),           "The prime p"),
    (Choice,    ("session", "mode"),            "Base mode: generic, rho0 (rho = 0) or char2 (tau = rho = 0)"),
    (int,       ("session", "max_d"),           "Largest first degree of the window (-1: 40 at p=2, 60 otherwise)"),
    (Choice,    ("session", "format"),          "Output format: text or json"),
    (int,       ("session", "truncation"),      "Largest power of v kept in H(B mu_p)"),
    (int,       ("verify", "samples"),          "Random samples per sampled verification check"),
    (int,       ("verify", "seed"),             "Seed of the verification sampler"),
]
# fmt: on

CHOICES: dict[tuple[str, ...], tuple[str, ...]] = {
    ("session", "mode"): MODES,
    ("session", "format"): FORMATS,
}

DEFAULT_CONFIG: dict[str, Any] = {
    "session": {
        "prime": 2,
        "mode": "generic",
        "max_d": -1,
        "format": "text",
        "truncation": 16,
    },
    "verify": {
        "samples": 25,
        "seed": 0,
    },
}


class ConfigError(Exception):
    pass


class NestedNamespace(SimpleNamespace):
    # Class to make a dict into something that dot-notation
    # can be used on.
    def __init__(self, dictionary: dict[str, Any], **kwargs: Any):
        super().__init__(**kwargs)
        for key, value in dictionary.items():
            if isinstance(value, dict):
                self.__setattr__(key, NestedNamespace(value))
            else:
                self.__setattr__(key, value)

    def __getitem__(self, key: Union[str, Sequence[str]]) -> Any:
        if isinstance(key, str):
            return self.__dict__[key]
        if len(key) > 1:
            tmp = reduce(lambda x, y: x[y].__dict__, key[:-1], cast(Any, self.__dict__))
            return tmp[key[-1]]
        return self.__dict__[key[0]]

    def __setitem__(self, key: Union[str, Sequence[str]], value: Any) -> None:
        if isinstance(key, str):
            self.__dict__[key] = value
            return
        tmp = self.__dict__
        for k in key[:-1]:
            if k not in tmp:
                tmp[k] = NestedNamespace({})
            tmp = tmp[k].__dict__
        tmp[key[-1]] = value

    def __contains__(self, key: Union[str, Sequence[str]]) -> bool:
        if isinstance(key, str):
            return key in self.__dict__
        tmp = self.__dict__
        for k in key[:-1]:
            if k not in tmp or not isinstance(tmp[k], NestedNamespace):
                return False
            tmp = tmp[k].__dict__
        return key[-1] in tmp

    def asdict(self) -> dict[str, Any]:
        d = {}
        for key, value in self.__dict__.items():
            if isinstance(value, NestedNamespace):
                dvalue: Any = value.asdict()
            else:
                dvalue = copy.deepcopy(value)
            d[key] = dvalue
        return d

    def __deepcopy__(self, memo: dict[Any, Any]) -> NestedNamespace:
        return type(self)(self.asdict())


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def validate_config(config: Union[dict[str, Any], NestedNamespace]) -> None:
    """Given a config, check if the fields are of the correct type.

    Args:
        config (Union[dict[str, Any], NestedNamespace]): config

    Raises:
        ConfigError: listing every problem found.
    """
    if isinstance(config, dict):
        config = NestedNamespace(config)
    key_problems = set()

    for key_type, path, _ in EXPECTED_ENTRIES:
        s = ".".join(path)
        if path not in config:
            key_problems.add(f"Missing entry for '{s}' in config")
            continue
        value = config[path]
        if key_type is Prime:
            if not _is_int(value) or not is_prime(value):
                key_problems.add(f"{s} should be a prime number, but is {value!r}.")
        elif key_type is Choice:
            if value not in CHOICES[path]:
                key_problems.add(
                    f"{s} should be one of {', '.join(CHOICES[path])}, but is {value!r}."
                )
        elif key_type is int:
            if not _is_int(value):
                key_problems.add(f"{s} should be an integer, but is {value!r}.")
            elif path[-1] != "max_d" and value < 0:
                key_problems.add(f"{s} should be non-negative, but is {value}.")

    if key_problems:
        raise ConfigError(
            "The config has problems:\n"
            + "\n".join(" - " + problem for problem in sorted(key_problems))
        )


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def import_config(
    config_path: Optional[Path] = None, validate: bool = True
) -> NestedNamespace:
    """Read and potentially verify the specified config.

    Missing entries fall back to DEFAULT_CONFIG, so a missing default file
    is not an error.

    Args:
        config_path (Optional[Path]): Path to config. Defaults to ~/.config/motsteen/config.json.
        validate (bool): Whether or not to validate the config.

    Returns:
        NestedNamespace: The config
    """
    config_dict = copy.deepcopy(DEFAULT_CONFIG)
    if config_path is None:
        if DEFAULT_CONFIG_PATH.exists():
            config_path = DEFAULT_CONFIG_PATH
            logging.debug(f"Using config found at {config_path}")
    elif not Path(config_path).is_file():
        raise ConfigError(f"Found no config.json file at {config_path}!")

    if config_path is not None:
        try:
            with open(config_path, "r") as f:
                config_dict = _merge(config_dict, json.load(f))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{config_path} is not valid JSON: {e}") from e
        config_dict["config_path"] = str(Path(config_path).absolute())

    config = NestedNamespace(config_dict)
    if validate:
        validate_config(config)
    return config


def get_config_and_parser(
    own_parser: Optional[argparse.ArgumentParser] = None,
    argv: Optional[Sequence[str]] = None,
) -> tuple[NestedNamespace, argparse.Namespace]:
    """Get the config object and its parser.
    own_parser must carry the flags of parsers.config_parser, either itself or
    on each of its subcommands (see parsers.main_parser). Will also parse the CLI.

    Args:
        own_parser (Optional[argparse.ArgumentParser]): Full parser to use
            instead of the bare config parser.
        argv (Optional[Sequence[str]]): Arguments, defaults to sys.argv[1:].

    Returns:
        tuple[NestedNamespace, argparse.Namespace]: The config and the parsed arguments.
    """
    if own_parser is not None:
        parser = own_parser
    else:
        parser = argparse.ArgumentParser(
            prog="motsteen", parents=[parsers.config_parser(EXPECTED_ENTRIES, CHOICES)]
        )
    args_parser = parser.parse_args(argv)

    # Log level
    if args_parser.log_level is not None:
        num_lvl = getattr(logging, args_parser.log_level.upper())
        logging.basicConfig(level=num_lvl)

    # Get config file
    config = import_config(
        Path(args_parser.config) if args_parser.config else None, validate=False
    )

    # Read values from CLI and override them in config
    for _, path, _ in EXPECTED_ENTRIES:
        arg_val = args_parser.__dict__[".".join(path)]
        if arg_val is not None:
            config[path] = arg_val

    validate_config(config)

    return config, args_parser


@dataclass(frozen=True)
class Session:
    """Settings every subcommand inherits."""

    prime: int = 2
    mode: BaseMode = BaseMode.GENERIC
    max_d: int = -1
    format: str = "text"
    truncation: int = 16
    crossing: str = "twisted"

    def __post_init__(self) -> None:
        if not is_prime(self.prime):
            raise ContractError(f"{self.prime} is not a prime")
        if self.crossing not in CROSSINGS:
            raise ContractError(f"Unknown crossing rule {self.crossing!r}")
        if self.max_d < 0:
            object.__setattr__(self, "max_d", default_max_d(self.prime))

    @classmethod
    def from_config(cls, config: NestedNamespace, crossing: str = "twisted") -> Session:
        s = config.session
        return cls(
            prime=s.prime,
            mode=BaseMode.from_str(s.mode),
            max_d=s.max_d,
            format=s.format,
            truncation=s.truncation,
            crossing=crossing,
        )

    def dual(self) -> DualSteenrod:
        return DualSteenrod(self.prime, self.mode, self.crossing)

    def steenrod(self) -> MotivicSteenrod:
        return MotivicSteenrod(self.prime, self.mode, self.max_d, self.crossing)

    def bmu(self) -> BmuModule:
        return BmuModule(self.prime, self.mode, self.truncation, self.crossing)

    def to_jsonable_dict(self) -> dict[str, Any]:
        return {
            "prime": self.prime,
            "mode": self.mode.value,
            "max_d": self.max_d,
            "format": self.format,
            "truncation": self.truncation,
            "crossing": self.crossing,
            "versions": VERSIONS.as_dict(),
        }
