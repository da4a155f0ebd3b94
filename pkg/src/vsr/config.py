"""Scenario and game configuration files.

Both use INI syntax (``[section]`` headers, ``key = value`` lines, ``#``
comments).  Errors carry the line number of the offending key.

A scenario drives one simulated transfer::

    [scenario]
    name = optimistic-ack-vsraa
    expect = detection          # detection | attack-success | complete
    seed = 7

    [protocol]
    scheme = vsr-aa
    modulus = 251               # integer, or p80 / lambda80 for 2^80 - 65

    [file]
    size = 2048
    segment_len = 256

    [path]
    links = 4
    drop = 3                    # first transmission of these indices is lost
    agents = 1:full, 2:tag-only

    [receiver]
    behavior = optimistic-acker

A game file describes a grid of (protocol, adversary) cells under ``[game]``.
"""
from __future__ import annotations

import configparser
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .field import P251, Modulus, parse_modulus
from .game import NOTIONS, GameConfig, get_adversary
from .mitm import GROUPS, RpkGroup, RpkKeypair
from .netsim import BEHAVIORS, CUMULATIVE, SACK, ConfigError, Link, SimConfig, Topology, place_agent
from .prims import HASHES, PRFS
from .schemes import MAV, RPK, SCHEME_NAMES

EXPECTATIONS = ("detection", "attack-success", "complete")

SCENARIO_KEYS = {
    "scenario": {"name", "expect", "seed"},
    "protocol": {"scheme", "modulus", "prf", "hash", "group", "prefix_cache"},
    "file": {"size", "path", "segment_len"},
    "transfer": {"ack_mode", "cwnd", "ssthresh", "w_max", "rto", "max_ticks", "dupack_threshold"},
    "path": {"links", "latency", "loss", "drop", "drop_link", "mav_position", "agents"},
    "receiver": {"behavior", "knows_content", "key", "lead", "keyfile"},
}
GAME_KEYS = {
    "game": {"protocols", "adversaries", "notion", "trials", "seed", "modulus", "segment_len",
             "min_segments", "max_segments", "catalog_size", "group", "hash", "prf", "workers"},
}


class _Source:
    """Parsed INI text plus the line number of every section and key."""

    def __init__(self, text: str, origin: str, allowed: dict[str, set[str]]):
        self.origin = origin
        self.parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
        try:
            self.parser.read_string(text, source=origin)
        except configparser.MissingSectionHeaderError as exc:
            raise ConfigError("key outside any [section]", exc.lineno) from None
        except configparser.ParsingError as exc:
            line = exc.errors[0][0] if exc.errors else None
            raise ConfigError(f"cannot parse {origin}", line) from None
        except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
            raise ConfigError(str(exc.message), exc.lineno) from None
        self.lines: dict[tuple[str, str | None], int] = {}
        section = None
        for no, raw in enumerate(text.splitlines(), start=1):
            s = raw.strip()
            m = re.match(r"\[([^\]]+)\]", s)
            if m:
                section = m.group(1).strip()
                self.lines[(section, None)] = no
            elif section and s and s[0] not in "#;" and ("=" in s or ":" in s):
                key = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
                self.lines.setdefault((section, key), no)
        for sec in self.parser.sections():
            if sec not in allowed:
                raise ConfigError(f"unknown section [{sec}]", self.lines.get((sec, None)))
            for key in self.parser[sec]:
                if key not in allowed[sec]:
                    raise ConfigError(f"unknown key {key!r} in [{sec}]", self.lines.get((sec, key)))

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key) and self.parser[section][key].strip() != ""

    def line(self, section: str, key: str) -> int | None:
        return self.lines.get((section, key))

    def get(self, section: str, key: str, default=None, conv=str):
        if not self.has(section, key):
            return default
        raw = self.parser[section][key].strip()
        try:
            return conv(raw)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"[{section}] {key}: {exc}", self.line(section, key)) from None

    def choice(self, section: str, key: str, options, default=None):
        value = self.get(section, key, default)
        if value is not None and value not in options:
            raise ConfigError(f"[{section}] {key}: {value!r} not one of {', '.join(options)}",
                              self.line(section, key))
        return value

    def fail(self, section: str, key: str, message: str):
        raise ConfigError(message, self.line(section, key))


def _bool(text: str) -> bool:
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text: str) -> list[int]:
    return [int(x) for x in re.split(r"[,\s]+", text) if x]


def _per_link(value: str, hops: int, conv) -> list:
    items = [conv(x) for x in re.split(r"[,\s]+", value) if x]
    if len(items) == 1:
        return items * hops
    if len(items) != hops:
        raise ValueError(f"expected 1 or {hops} values, got {len(items)}")
    return items


def _read(path: str | Path) -> tuple[str, str]:
    p = Path(path)
    return p.read_text(), str(p)


@dataclass
class Scenario:
    sim: SimConfig
    expect: str | None
    source: str


def load_keypair(path: str | Path) -> RpkKeypair:
    """Read an RPK keypair written by ``vsr keygen``."""
    groups = dict(GROUPS)
    for line in Path(path).read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        rec = json.loads(line)
        if rec.get("type") == "rpk-group":
            groups[rec["name"]] = RpkGroup(int(rec["p"]), int(rec["q"]), int(rec["g"]))
        elif rec.get("type") == "rpk-keypair":
            return RpkKeypair(groups[rec["group"]], int(rec["s"]), int(rec["PK"]))
    raise ConfigError(f"{path}: no rpk-keypair record")


def parse_scenario(text: str, origin: str = "<string>", base_dir: Path | None = None) -> Scenario:
    src = _Source(text, origin, SCENARIO_KEYS)
    cfg = SimConfig()
    cfg.name = src.get("scenario", "name", Path(origin).stem)
    expect = src.choice("scenario", "expect", EXPECTATIONS)
    cfg.expect = expect
    cfg.seed = src.get("scenario", "seed", 0, int)

    cfg.scheme = src.choice("protocol", "scheme", SCHEME_NAMES, "vsr-aa")
    cfg.modulus = src.get("protocol", "modulus", P251, parse_modulus)
    cfg.prf = src.choice("protocol", "prf", tuple(PRFS), cfg.prf)
    cfg.hash = src.choice("protocol", "hash", tuple(HASHES), cfg.hash)
    cfg.group = src.choice("protocol", "group", tuple(GROUPS), cfg.group)
    cfg.prefix_cache = src.get("protocol", "prefix_cache", False, _bool)
    if cfg.scheme == RPK and cfg.modulus.value > GROUPS[cfg.group].p:
        src.fail("protocol", "group", f"group {cfg.group} is smaller than the tag field")

    if src.has("file", "path"):
        p = Path(src.get("file", "path"))
        if not p.is_absolute() and base_dir is not None:
            p = base_dir / p
        try:
            cfg.content = p.read_bytes()
        except OSError as exc:
            src.fail("file", "path", f"cannot read {p}: {exc.strerror}")
        cfg.fid = p.name.encode()
        if not cfg.content:
            src.fail("file", "path", "empty transfers are rejected")
    cfg.file_size = src.get("file", "size", cfg.file_size, int)
    if cfg.content is None and cfg.file_size < 1:
        src.fail("file", "size", "file size must be >= 1")
    cfg.segment_len = src.get("file", "segment_len", cfg.segment_len, int)
    if cfg.segment_len < 1:
        src.fail("file", "segment_len", "segment_len must be >= 1")

    cfg.ack_mode = src.choice("transfer", "ack_mode", (CUMULATIVE, SACK), CUMULATIVE)
    cfg.initial_cwnd = src.get("transfer", "cwnd", cfg.initial_cwnd, int)
    cfg.initial_ssthresh = src.get("transfer", "ssthresh", cfg.initial_ssthresh, int)
    cfg.w_max = src.get("transfer", "w_max", cfg.w_max, int)
    cfg.rto_ticks = src.get("transfer", "rto", cfg.rto_ticks, int)
    cfg.max_ticks = src.get("transfer", "max_ticks", cfg.max_ticks, int)
    cfg.dupack_threshold = src.get("transfer", "dupack_threshold", cfg.dupack_threshold, int)
    for key, value in (("cwnd", cfg.initial_cwnd), ("w_max", cfg.w_max), ("rto", cfg.rto_ticks)):
        if value < 1:
            src.fail("transfer", key, f"{key} must be >= 1")

    hops = src.get("path", "links", 1, int)
    if hops < 1:
        src.fail("path", "links", "the path needs at least one link")
    latency = src.get("path", "latency", [0] * hops, lambda v: _per_link(v, hops, int))
    loss = src.get("path", "loss", [0.0] * hops, lambda v: _per_link(v, hops, float))
    topo = Topology([Link(lo, la) for lo, la in zip(loss, latency)])
    topo.drops = frozenset(src.get("path", "drop", [], _int_list))
    topo.drop_link = src.get("path", "drop_link", None, int)
    topo.mav_position = src.get("path", "mav_position", None, int)
    for spec in src.get("path", "agents", [], lambda v: [a.strip() for a in v.split(",") if a.strip()]):
        hop, _, capture = spec.partition(":")
        try:
            place_agent(topo, int(hop), capture.strip() or "full")
        except (ValueError, ConfigError) as exc:
            src.fail("path", "agents", f"bad agent {spec!r}: {exc}")
    try:
        topo.validate()
    except ConfigError as exc:
        src.fail("path", "links", str(exc))
    cfg.topology = topo
    if cfg.scheme == MAV and topo.mav_position is None:
        src.fail("protocol", "scheme", "the MAV scheme needs [path] mav_position")

    cfg.behavior = src.choice("receiver", "behavior", BEHAVIORS, cfg.behavior)
    cfg.knows_content = src.get("receiver", "knows_content", False, _bool)
    cfg.receiver_key = src.choice("receiver", "key", ("own", "wrong"), "own")
    cfg.lead = src.get("receiver", "lead", 0, int)
    if src.has("receiver", "keyfile"):
        kp = Path(src.get("receiver", "keyfile"))
        if not kp.is_absolute() and base_dir is not None:
            kp = base_dir / kp
        try:
            cfg.receiver_keypair = load_keypair(kp)
        except (OSError, ValueError, KeyError) as exc:
            src.fail("receiver", "keyfile", f"cannot load {kp}: {exc}")
        if cfg.modulus.value > cfg.receiver_keypair.group.p:
            src.fail("receiver", "keyfile", "the key's group is smaller than the tag field")
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError(str(exc), exc.line) from None
    return Scenario(cfg, expect, origin)


def load_scenario(path: str | Path) -> Scenario:
    text, origin = _read(path)
    return parse_scenario(text, origin, Path(path).parent)


@dataclass
class GameGrid:
    cells: list[tuple[GameConfig, str]]
    workers: int = 1
    source: str = "<string>"
    notes: list[str] = field(default_factory=list)


def parse_game(text: str, origin: str = "<string>", *, seed: int | None = None,
               trials: int | None = None) -> GameGrid:
    """Grid of cells; ``seed`` and ``trials`` override the file."""
    src = _Source(text, origin, GAME_KEYS)
    if not src.parser.has_section("game"):
        raise ConfigError(f"{origin}: missing [game] section")

    def names(key: str, known) -> list[str]:
        items = [x.strip() for x in src.get("game", key, "").split(",") if x.strip()]
        if not items:
            src.fail("game", key, f"[game] {key} is required")
        for x in items:
            if x not in known:
                src.fail("game", key, f"unknown {key[:-1]} {x!r}")
        return items

    from .adversaries import ADVERSARIES

    protocols = names("protocols", SCHEME_NAMES)
    adversaries = names("adversaries", ADVERSARIES)
    notion = src.get("game", "notion", "auto")
    if notion != "auto" and notion not in NOTIONS:
        src.fail("game", "notion", f"unknown notion {notion!r}")
    n_trials = trials if trials is not None else src.get("game", "trials", 100_000, int)
    master = seed if seed is not None else src.get("game", "seed", 0, int)
    modulus: Modulus = src.get("game", "modulus", P251, parse_modulus)
    group = src.choice("game", "group", tuple(GROUPS), "desk263")
    common = dict(
        trials=n_trials, rng_seed=master, modulus=modulus,
        segment_len=src.get("game", "segment_len", 64, int),
        min_segments=src.get("game", "min_segments", 1, int),
        max_segments=src.get("game", "max_segments", 6, int),
        catalog_size=src.get("game", "catalog_size", 4, int),
        group=group,
        hash=src.choice("game", "hash", tuple(HASHES), "default-hash"),
        prf=src.choice("game", "prf", tuple(PRFS), "default-prf"),
    )
    cells = []
    for proto in protocols:
        if proto == RPK and modulus.value > GROUPS[group].p:
            src.fail("game", "group", f"group {group} is smaller than the tag field")
        for adv in adversaries:
            cell_notion = get_adversary(adv).notion if notion == "auto" else notion
            try:
                cells.append((GameConfig(notion=cell_notion, protocol=proto, **common), adv))
            except ValueError as exc:
                raise ConfigError(str(exc), src.line("game", "protocols")) from None
    return GameGrid(cells, src.get("game", "workers", 1, int), origin)


def load_game(path: str | Path, **overrides) -> GameGrid:
    text, origin = _read(path)
    return parse_game(text, origin, **overrides)
