"""Executable security games for receipt schemes.

A trial runs the four phases in order (query 1, challenge, query 2, guess)
against a :class:`Challenger` that owns every oracle.  Adversaries are plain
objects with one method per phase; see :class:`Adversary`.  :func:`run_game`
repeats trials with per-trial RNG streams split from one master seed and
returns the empirical win rate with a binomial interval.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .field import P251, Modulus
from .mitm import GROUPS, verifier_key
from .schemes import MAV, RPK, Scheme, make_scheme
from .segmentation import FileRecord, Segment, SessionParams, segment_file

KFC_TA = "KFC-TA"
KFC = "KFC"
TA = "TA"
NOTIONS = (KFC_TA, KFC, TA)

PLAYBACK = "playback"
SEGMENT_QUERY = "segment_query"
TAG_ACCESS = "tag_access"
PROOF_VERIFY = "proof_verify"
VERIFIER_KEY = "verifier_key"


class GameRuleViolation(Exception):
    """The adversary broke a phase or notion rule; the trial counts as a loss."""


@dataclass(frozen=True)
class OracleQuery:
    kind: str
    session: str
    args: tuple
    phase: str


@dataclass
class GameTranscript:
    trial: int
    queries: list[OracleQuery] = field(default_factory=list)
    I_SQ: set[int] = field(default_factory=set)
    I_TA: set[int] = field(default_factory=set)
    I_G: set[int] = field(default_factory=set)
    F1: set[bytes] = field(default_factory=set)
    F2: set[bytes] = field(default_factory=set)
    challenge_fid: bytes | None = None
    guess: tuple | None = None
    won: bool = False
    violation: str | None = None


@dataclass(frozen=True)
class GameConfig:
    notion: str
    protocol: str
    trials: int
    rng_seed: int = 0
    modulus: Modulus = P251
    segment_len: int = 64
    min_segments: int = 1
    max_segments: int = 6
    catalog_size: int = 4
    query_cap_factor: int = 10
    transcript_cap: int = 16
    group: str = "desk263"
    hash: str = "default-hash"
    prf: str = "default-prf"

    def __post_init__(self) -> None:
        if self.notion not in NOTIONS:
            raise ValueError(f"unknown notion {self.notion!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 1 <= self.min_segments <= self.max_segments:
            raise ValueError("bad segment-count range")


class Session:
    """One tagged transfer.  The adversary only ever sees this handle."""

    def __init__(self, ch: Challenger, label: str, file: FileRecord, l: int, challenge: bool):
        self.ch = ch
        self.label = label
        self.fid = file.fid
        self.l = l
        self.is_challenge = challenge
        self.terminated = False
        rng = ch.rng
        n = -(-len(file.content) // l)
        self.params = SessionParams(l, n, isn=rng.getrandbits(32), offset=1)
        self.sender = ch.scheme.new_sender(rng)
        self._segments = segment_file(file, self.params)
        self._wire = [self.sender.tag(s.index, s) for s in self._segments]
        self._delivered = [ch.scheme.receiver_view(self.sender, s.index, s, t)
                           for s, t in zip(self._segments, self._wire)]

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def isn(self) -> int:
        return self.params.isn

    @property
    def offset(self) -> int:
        return self.params.offset

    def _enter(self, kind: str, args: tuple, i: int | None = None) -> None:
        ch = self.ch
        if ch.phase not in ("query1", "query2"):
            raise GameRuleViolation(f"{kind} query outside a query phase ({ch.phase})")
        if self.is_challenge and ch.phase != "query2":
            raise GameRuleViolation("challenge session queried before the challenge phase")
        if self.terminated:
            raise GameRuleViolation("session terminated after a failed proof")
        if i is not None and not 1 <= i <= self.n:
            raise GameRuleViolation(f"index {i} outside [1, {self.n}]")
        ch.count_query()
        ch.transcript.queries.append(OracleQuery(kind, self.label, args, ch.phase))

    def segment_query(self, i: int) -> tuple[Segment, object]:
        self._enter(SEGMENT_QUERY, (i,), i)
        if self.is_challenge:
            self.ch.transcript.I_SQ.add(i)
        return self._segments[i - 1], self._delivered[i - 1]

    def tag_access(self, i: int):
        self._enter(TAG_ACCESS, (i,), i)
        if self.is_challenge:
            if self.ch.config.notion == KFC:
                raise GameRuleViolation("tag access on the challenge session is not allowed under KFC")
            self.ch.transcript.I_TA.add(i)
        return self._wire[i - 1]

    def proof_verify(self, I, proof) -> int:
        I = frozenset(I)
        self._enter(PROOF_VERIFY, (tuple(sorted(I)),))
        if not I <= set(range(1, self.n + 1)):
            raise GameRuleViolation("proof-verify index set outside [1, n]")
        bit = self.sender.verify(sorted(I), proof).bit
        if self.is_challenge and bit == 0:
            self.terminated = True
        return bit

    def verifier_key(self, i: int):
        """g_i of the middle-address-verifier (MAV scheme only)."""
        if self.ch.scheme.name != MAV:
            raise GameRuleViolation("no verifier keys outside the MAV scheme")
        self._enter(VERIFIER_KEY, (i,), i)
        if self.is_challenge:
            self.ch.transcript.I_G.add(i)
        return verifier_key(self.sender.mav_keys.g, i)


class PlaybackSession(Session):
    @property
    def pairs(self) -> list[tuple[Segment, object]]:
        """The full playback reply {(s_i, t_i)}."""
        return list(zip(self._segments, self._delivered))


class Challenger:
    def __init__(self, config: GameConfig, scheme: Scheme, catalog: dict[bytes, FileRecord],
                 rng: random.Random, trial: int = 0):
        self.config = config
        self.scheme = scheme
        self.catalog = catalog
        self.rng = rng
        self.phase = "setup"
        self.transcript = GameTranscript(trial)
        self.challenge_session: Session | None = None
        self._playbacks = 0
        self._queries = 0
        self.query_cap = config.query_cap_factor * config.max_segments

    @property
    def fids(self) -> list[bytes]:
        return sorted(self.catalog)

    @property
    def receiver_private(self) -> int | None:
        """The adversary plays the receiver, so under RPK it holds s."""
        return self.scheme.receiver.s if self.scheme.name == RPK else None

    def count_query(self) -> None:
        self._queries += 1
        if self._queries > self.query_cap:
            raise GameRuleViolation(f"more than {self.query_cap} queries in {self.phase}")

    def playback(self, fid: bytes, l: int) -> PlaybackSession:
        if self.phase not in ("query1", "query2"):
            raise GameRuleViolation(f"playback outside a query phase ({self.phase})")
        if fid not in self.catalog:
            raise GameRuleViolation(f"unknown fid {fid!r}")
        if self.phase == "query2" and self.config.notion == TA and fid == self.transcript.challenge_fid:
            raise GameRuleViolation("TA forbids playback of the challenge file in query 2")
        self.count_query()
        self.transcript.queries.append(OracleQuery(PLAYBACK, "-", (fid, l), self.phase))
        (self.transcript.F1 if self.phase == "query1" else self.transcript.F2).add(fid)
        self._playbacks += 1
        return PlaybackSession(self, f"pb{self._playbacks}", self.catalog[fid], l, challenge=False)

    def open_challenge(self, fid: bytes, l: int) -> Session:
        if fid not in self.catalog:
            raise GameRuleViolation(f"unknown challenge fid {fid!r}")
        if self.config.notion == TA and fid in self.transcript.F1:
            raise GameRuleViolation("TA requires a challenge fid not played back in query 1")
        self.transcript.challenge_fid = fid
        self.challenge_session = Session(self, "challenge", self.catalog[fid], l, challenge=True)
        return self.challenge_session


class Adversary:
    """Phase callbacks.  Override what the strategy needs."""

    id = "null"
    notion = KFC

    def __init__(self, rng: random.Random):
        self.rng = rng

    def query1(self, ch: Challenger) -> None:
        pass

    def choose_challenge(self, ch: Challenger) -> tuple[bytes, int]:
        return self.rng.choice(ch.fids), ch.config.segment_len

    def query2(self, ch: Challenger, session: Session) -> None:
        pass

    def guess(self, ch: Challenger, session: Session) -> tuple[set[int], object]:
        raise NotImplementedError


def _random_catalog(config: GameConfig, rng: random.Random) -> dict[bytes, FileRecord]:
    l = config.segment_len
    catalog = {}
    for k in range(config.catalog_size):
        n = rng.randint(config.min_segments, config.max_segments)
        size = rng.randint((n - 1) * l + 1, n * l)
        fid = f"file-{k}".encode()
        catalog[fid] = FileRecord(fid, rng.randbytes(size))
    return catalog


def _build_scheme(config: GameConfig, rng: random.Random) -> Scheme:
    return make_scheme(config.protocol, config.modulus, prf=config.prf, hash=config.hash,
                       group=GROUPS[config.group], rng=rng)


def play_trial(config: GameConfig, adversary_factory: Callable[[random.Random], Adversary],
               trial: int, scheme: Scheme | None = None) -> GameTranscript:
    base = f"{config.rng_seed}:{trial}"
    ch_rng = random.Random(base + ":challenger")
    adv = adversary_factory(random.Random(base + ":adversary"))
    if scheme is None or scheme.name == RPK:
        # RPK draws a fresh receiver keypair per trial.
        scheme = _build_scheme(config, ch_rng)
    ch = Challenger(config, scheme, _random_catalog(config, ch_rng), ch_rng, trial)
    tr = ch.transcript
    try:
        ch.phase = "query1"
        adv.query1(ch)
        ch.phase = "challenge"
        fid, l = adv.choose_challenge(ch)
        session = ch.open_challenge(fid, l)
        ch.phase = "query2"
        ch._queries = 0
        adv.query2(ch, session)
        ch.phase = "guess"
        I, proof = adv.guess(ch, session)
        I = frozenset(I)
        tr.guess = (tuple(sorted(I)), proof)
        if not I or not I <= set(range(1, session.n + 1)):
            raise GameRuleViolation("guess index set must be a nonempty subset of [1, n]")
        if not I - tr.I_SQ:
            raise GameRuleViolation("guess covers only segment-queried indices")
        if I & tr.I_G:
            raise GameRuleViolation("guess includes an index whose verifier key was revealed")
        tr.won = session.sender.verify(sorted(I), proof).accepted
    except GameRuleViolation as exc:
        tr.violation = str(exc)
        tr.won = False
    ch.phase = "done"
    return tr


def audit(tr: GameTranscript, notion: str) -> list[str]:
    """Post-hoc check of a transcript against the game's side conditions."""
    problems = []
    if tr.won:
        I = set(tr.guess[0])
        if not I - tr.I_SQ:
            problems.append("winning guess has I within I_SQ")
        if I & tr.I_G:
            problems.append("winning guess uses a revealed verifier key")
        if tr.violation:
            problems.append("winning transcript carries a violation")
    if notion == KFC and tr.I_TA:
        problems.append("tag access recorded on the challenge session under KFC")
    if notion == TA and tr.challenge_fid is not None and (tr.challenge_fid in tr.F1 or tr.challenge_fid in tr.F2):
        problems.append("TA challenge fid was played back")
    return problems


@dataclass
class GameResult:
    notion: str
    protocol: str
    adversary: str
    trials: int
    wins: int
    flagged: int
    seed: int
    modulus: int
    audit_failures: int = 0
    transcripts: list[GameTranscript] = field(default_factory=list, repr=False)

    @property
    def advantage(self) -> float:
        return self.wins / self.trials

    def stderr(self, p0: float | None = None) -> float:
        """Binomial standard error at ``p0`` (default: the observed rate)."""
        p = self.advantage if p0 is None else p0
        return math.sqrt(p * (1 - p) / self.trials)

    def interval(self, z: float = 3.0) -> tuple[float, float]:
        """Wilson score interval."""
        n, phat = self.trials, self.advantage
        denom = 1 + z * z / n
        centre = (phat + z * z / (2 * n)) / denom
        half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
        return max(0.0, centre - half), min(1.0, centre + half)

    def record(self) -> dict:
        lo, hi = self.interval()
        return {
            "notion": self.notion,
            "protocol": self.protocol,
            "adversary": self.adversary,
            "modulus": self.modulus,
            "trials": self.trials,
            "wins": self.wins,
            "advantage": round(self.advantage, 6),
            "ci_low": round(lo, 6),
            "ci_high": round(hi, 6),
            "z": 3.0,
            "flagged": self.flagged,
            "audit_failures": self.audit_failures,
            "seed": self.seed,
        }


def get_adversary(name: str) -> type[Adversary]:
    from .adversaries import ADVERSARIES

    try:
        return ADVERSARIES[name]
    except KeyError:
        raise ValueError(f"unknown adversary {name!r}; known: {', '.join(sorted(ADVERSARIES))}") from None


def _run_range(config: GameConfig, adversary, start: int, stop: int):
    factory = get_adversary(adversary) if isinstance(adversary, str) else adversary
    scheme = _build_scheme(config, random.Random(f"{config.rng_seed}:scheme")) if config.protocol != RPK else None
    wins = flagged = audit_failures = 0
    kept = []
    for trial in range(start, stop):
        tr = play_trial(config, factory, trial, scheme)
        wins += tr.won
        flagged += tr.violation is not None
        problems = audit(tr, config.notion)
        audit_failures += bool(problems)
        if trial < config.transcript_cap or (tr.won and len(kept) < 10 * config.transcript_cap):
            kept.append(tr)
    return wins, flagged, audit_failures, kept


def run_game(config: GameConfig, adversary: str | Callable[[random.Random], Adversary],
             workers: int = 1) -> GameResult:
    """Monte-Carlo estimate of the adversary's advantage.

    ``adversary`` is a registered id or a factory taking the adversary's RNG.
    Parallel runs (``workers > 1``) need a registered id; results do not
    depend on the worker count.
    """
    if workers > 1 and not isinstance(adversary, str):
        raise ValueError("parallel runs need a registered adversary id")
    if workers <= 1:
        parts = [_run_range(config, adversary, 0, config.trials)]
    else:
        bounds = [config.trials * k // workers for k in range(workers + 1)]
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_run_range, config, adversary, a, b) for a, b in zip(bounds, bounds[1:]) if a < b]
            parts = [f.result() for f in futures]
    wins = sum(p[0] for p in parts)
    flagged = sum(p[1] for p in parts)
    audit_failures = sum(p[2] for p in parts)
    transcripts = [t for p in parts for t in p[3]]
    adv_id = adversary if isinstance(adversary, str) else getattr(adversary, "id", getattr(adversary, "__name__", "custom"))
    return GameResult(config.notion, config.protocol, adv_id, config.trials, wins, flagged,
                      config.rng_seed, config.modulus.value, audit_failures, transcripts)
