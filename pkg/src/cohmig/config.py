"""Run configuration files.

Grammar: an INI file (``configparser`` syntax, ``#``/``;`` comments) with a
``[run]`` section and exactly one scenario section::

    [run]
    seed = 20180101          ; optional, default DEFAULT_SEED
    output_path = out/cphase ; optional, default "results"
    scenario = cphase        ; optional, must name the scenario section present

    [cphase]                 ; or [spdc], [conservation], [tomo-roundtrip]
    phis_over_pi = 0, 0.05, 0.125, 0.25, 0.5, 0.75, 1

Lists are comma separated. Booleans accept true/false/yes/no/1/0. Every key
of a scenario section is optional and falls back to the default in SCHEMA.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .spdc import TABLE2_D_UM
from .cphase import TABLE1_PHIS_OVER_PI

DEFAULT_SEED = 20180101
DEFAULT_OUTPUT = "results"
SCENARIOS = ("cphase", "spdc", "conservation", "tomo-roundtrip")


@dataclass(frozen=True)
class Diagnostic:
    section: str
    field: str | None
    message: str
    line: int | None = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line else ""
        name = f"[{self.section}] {self.field}" if self.field else f"[{self.section}]"
        return f"{where}{name}: {self.message}"


@dataclass
class RunConfig:
    scenario: str
    seed: int = DEFAULT_SEED
    output_path: str = DEFAULT_OUTPUT
    params: dict[str, Any] = field(default_factory=dict)


def _floats(text: str) -> tuple[float, ...]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(float(s) for s in items)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        t = text.strip().lower()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return t

    return parse


def _positive(x) -> str | None:
    return None if x > 0 else "must be > 0"


def _non_negative(x) -> str | None:
    return None if x >= 0 else "must be >= 0"


def _unit(x) -> str | None:
    return None if 0 <= x <= 1 else "must lie in [0, 1]"


def _unit_open(x) -> str | None:
    return None if 0 < x <= 1 else "must lie in (0, 1]"


def _at_least(n):
    return lambda x: None if x >= n else f"must be >= {n}"


def _all_finite(xs) -> str | None:
    return None if all(abs(x) != float("inf") and x == x for x in xs) else "values must be finite"


# key -> (parser, default, range check)
SCHEMA: dict[str, dict[str, tuple[Callable, Any, Callable | None]]] = {
    "run": {
        "scenario": (_choice(*SCENARIOS), None, None),
        "seed": (int, DEFAULT_SEED, _non_negative),
        "output_path": (str.strip, DEFAULT_OUTPUT, None),
    },
    "cphase": {
        "phis_over_pi": (_floats, TABLE1_PHIS_OVER_PI, _all_finite),
        "white_noise_weight": (float, 0.0, _unit),
        "counts_per_setting": (int, 0, _non_negative),
        "replicates": (int, 30, _at_least(10)),
        "uncertainty": (_choice("poisson", "repeated"), "poisson", None),
        "curve_points": (int, 201, _at_least(2)),
    },
    "spdc": {
        "displacements_um": (_floats, TABLE2_D_UM, _all_finite),
        "fit_offset": (float, 0.029, _unit),
        "fit_amplitude": (float, 0.945, _unit),
        "fwhm_um": (float, 142.0, _positive),
        "triplet_visibility": (float, 0.94, _unit_open),
        "bias_um": (float, 84.0, None),
        "raw_delays": (_bool, False, None),
        "coincidences": (int, 0, _non_negative),
        "curve_points": (int, 201, _at_least(2)),
        "curve_max_um": (float, 200.0, _positive),
    },
    "conservation": {
        "samples": (int, 10_000, _positive),
        "pure_fraction": (float, 0.5, _unit),
        "tolerance": (float, 1e-10, _positive),
    },
    "tomo-roundtrip": {
        "states": (int, 50, _positive),
        "state_kind": (_choice("pure", "mixed"), "pure", None),
        "counts_per_setting": (int, 10_000, _positive),
        "tol": (float, 1e-10, _positive),
        "max_iter": (int, 100_000, _positive),
    },
}


def _line_index(text: str) -> dict[tuple[str, str | None], int]:
    """Map (section, key) and (section, None) to 1-based line numbers."""
    index: dict[tuple[str, str | None], int] = {}
    section = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            index.setdefault((section, None), n)
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", line)
        if section and m:
            index.setdefault((section, m.group(1).strip().lower()), n)
    return index


def parse_text(text: str) -> tuple[RunConfig | None, list[Diagnostic]]:
    """Parse config text; returns (config or None, diagnostics)."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as err:
        line = getattr(err, "lineno", None)
        if line is None and getattr(err, "errors", None):
            line = err.errors[0][0]
        return None, [Diagnostic("config", None, f"syntax error: {err.message.splitlines()[0]}", line)]

    lines = _line_index(text)
    diags: list[Diagnostic] = []

    def diag(section, key, message):
        diags.append(Diagnostic(section, key, message, lines.get((section, key))))

    for section in parser.sections():
        if section not in SCHEMA:
            diag(section, None, f"unknown section (expected run or one of {', '.join(SCENARIOS)})")

    present = [s for s in SCENARIOS if parser.has_section(s)]
    if len(present) > 1:
        diag(present[1], None, f"only one scenario block allowed, found {', '.join(present)}")
    elif not present:
        diag("run", None, f"no scenario block; add one of {', '.join(f'[{s}]' for s in SCENARIOS)}")

    values: dict[str, dict[str, Any]] = {}
    for section in ["run", *present]:
        schema = SCHEMA[section]
        out = {k: spec[1] for k, spec in schema.items()}
        if parser.has_section(section):
            for key, raw in parser.items(section):
                if key not in schema:
                    diag(section, key, "unknown field")
                    continue
                conv, _, check = schema[key]
                try:
                    val = conv(raw)
                except ValueError as err:
                    diag(section, key, f"invalid value {raw!r} ({err})")
                    continue
                problem = check(val) if check else None
                if problem:
                    diag(section, key, f"{val!r} {problem}")
                    continue
                out[key] = val
        values[section] = out

    run = values["run"]
    if run["scenario"] and present and run["scenario"] not in present:
        diag("run", "scenario", f"names {run['scenario']!r} but the scenario block is [{present[0]}]")

    if "spdc" in values:
        s = values["spdc"]
        if s["fit_offset"] + s["fit_amplitude"] > 1 + 1e-6:
            diag("spdc", "fit_amplitude", "fit_offset + fit_amplitude must not exceed 1")

    if diags or not present:
        return None, diags
    return (
        RunConfig(
            scenario=present[0],
            seed=run["seed"],
            output_path=run["output_path"],
            params=values[present[0]],
        ),
        [],
    )


def load(path) -> tuple[RunConfig | None, list[Diagnostic]]:
    """Read and parse a config file. I/O errors propagate."""
    return parse_text(Path(path).read_text(encoding="utf-8"))


def validate(path) -> list[Diagnostic]:
    """Schema and range diagnostics for a config file; empty means valid."""
    return load(path)[1]


def default_config_text(scenario: str) -> str:
    """The shipped example config for ``scenario``."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}")
    return (Path(__file__).parent / "configs" / f"{scenario}.ini").read_text(encoding="utf-8")
