"""Deterministic discrete-event simulation of a receipt-protected transfer.

Path model: nodes 0..H with node 0 the sender and node H the receiver; link
k joins node k to node k+1.  A packet at node k is first seen by any agents
placed there, then processed by the middle-address-verifier if it sits at k,
then crosses link k (or is dropped) and arrives at node k+1 after
``1 + latency`` ticks.  Acknowledgements return over a lossless reverse path.

The sender runs slow start / congestion avoidance with a fixed RTO and a
Tahoe-style reaction to timeouts and triple duplicate acks.  Every ack carries
a proof over its full index set; a rejected proof ends the session.
"""
from __future__ import annotations

import heapq
import json
import random
from dataclasses import dataclass, field

from .field import P251, Modulus
from .mitm import GROUPS, RpkKeypair, rpk_keygen
from .schemes import MAV, RPK, Scheme, make_scheme
from .segmentation import FileRecord, Segment, SessionParams, make_segment, segment_file
from .verdict import Verdict

HONEST = "honest"
OPTIMISTIC = "optimistic-acker"
PLAYBACK = "playback-attacker"
BEHAVIORS = (HONEST, OPTIMISTIC, PLAYBACK)
CUMULATIVE = "cumulative"
SACK = "sack"
FULL = "full"
TAG_ONLY = "tag-only"

REPORT_HEADER = "# vsr-simreport v1"


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class Link:
    loss: float = 0.0
    latency: int = 0


@dataclass
class Agent:
    """Eavesdropper at a node, feeding the receiver-side attacker instantly."""

    position: int
    capture: str = FULL
    records: dict[int, tuple[Segment | None, object]] = field(default_factory=dict)

    def observe(self, index: int, segment: Segment, tag) -> None:
        if index not in self.records:
            self.records[index] = (segment if self.capture == FULL else None, tag)


@dataclass
class Topology:
    links: list[Link]
    agents: list[Agent] = field(default_factory=list)
    mav_position: int | None = None
    drops: frozenset[int] = frozenset()
    drop_link: int | None = None

    @property
    def hops(self) -> int:
        return len(self.links)

    def validate(self) -> None:
        if not self.links:
            raise ConfigError("the path needs at least one link")
        if self.mav_position is not None and not 0 < self.mav_position < self.hops:
            raise ConfigError(f"mav_position {self.mav_position} must lie strictly between 0 and {self.hops}")
        for a in self.agents:
            if not 0 <= a.position < self.hops:
                raise ConfigError(f"agent position {a.position} not on the path [0, {self.hops - 1}]")
            if a.capture not in (FULL, TAG_ONLY):
                raise ConfigError(f"unknown agent capture {a.capture!r}")
        link = self.hops - 1 if self.drop_link is None else self.drop_link
        if not 0 <= link < self.hops:
            raise ConfigError(f"drop_link {link} not on the path")
        for lk in self.links:
            if not 0 <= lk.loss <= 1 or lk.latency < 0:
                raise ConfigError("loss must be in [0, 1] and latency >= 0")

    @property
    def reverse_delay(self) -> int:
        return sum(1 + lk.latency for lk in self.links)


def place_agent(topology: Topology, hop: int, capture: str = FULL) -> Agent:
    if not 0 <= hop < topology.hops:
        raise ConfigError(f"agent hop {hop} not on the path [0, {topology.hops - 1}]")
    agent = Agent(hop, capture)
    topology.agents.append(agent)
    return agent


@dataclass
class SimConfig:
    scheme: str = "vsr-aa"
    modulus: Modulus = P251
    prf: str = "default-prf"
    hash: str = "default-hash"
    group: str = "desk263"
    prefix_cache: bool = False
    file_size: int = 4096
    content: bytes | None = None
    fid: bytes = b"synthetic"
    segment_len: int = 536
    topology: Topology = field(default_factory=lambda: Topology([Link()]))
    behavior: str = HONEST
    ack_mode: str = CUMULATIVE
    knows_content: bool = False
    receiver_key: str = "own"
    receiver_keypair: RpkKeypair | None = None
    lead: int = 0
    initial_cwnd: int = 1
    initial_ssthresh: int = 16
    w_max: int = 64
    rto_ticks: int = 32
    max_ticks: int = 100_000
    dupack_threshold: int = 3
    seed: int = 0
    name: str = "adhoc"
    expect: str | None = None
    trace: bool = False

    def validate(self) -> None:
        if self.behavior not in BEHAVIORS:
            raise ConfigError(f"unknown behavior {self.behavior!r}")
        if self.ack_mode not in (CUMULATIVE, SACK):
            raise ConfigError(f"unknown ack mode {self.ack_mode!r}")
        if self.segment_len < 1:
            raise ConfigError("segment_len must be >= 1")
        if self.content is None and self.file_size < 1:
            raise ConfigError("empty transfers are rejected")
        if self.initial_cwnd < 1 or self.w_max < 1 or self.rto_ticks < 1:
            raise ConfigError("cwnd, w_max and rto_ticks must be >= 1")
        if self.scheme == MAV and self.topology.mav_position is None:
            raise ConfigError("the MAV scheme needs a mav_position on the path")
        if self.receiver_key not in ("own", "wrong"):
            raise ConfigError("receiver key must be 'own' or 'wrong'")
        self.topology.validate()


@dataclass
class AckRecord:
    sent_tick: int
    verify_tick: int
    mode: str
    I: list[int]
    proof: str
    verdict: str
    claims_undelivered: bool

    def record(self) -> dict:
        return {
            "type": "ack",
            "sent": self.sent_tick,
            "verified": self.verify_tick,
            "mode": self.mode,
            "I": _ranges(self.I),
            "proof": self.proof,
            "verdict": self.verdict,
            "claims_undelivered": self.claims_undelivered,
        }


def _ranges(indices: list[int]) -> list[list[int]]:
    out: list[list[int]] = []
    for i in sorted(indices):
        if out and out[-1][1] == i - 1:
            out[-1][1] = i
        else:
            out.append([i, i])
    return out


@dataclass
class SimReport:
    name: str
    scheme: str
    behavior: str
    seed: int
    n: int
    segment_len: int
    tag_bytes: int
    proof_bytes: int
    packet_sizes: list[int]
    acks: list[AckRecord]
    delivered_bytes: int
    segments_sent: int
    retransmissions: int
    termination_tick: int
    termination_reason: str
    cwnd_trace: list[tuple[int, int]]
    trace: list[str] = field(default_factory=list, repr=False)

    @property
    def terminated(self) -> bool:
        return self.termination_reason not in ("complete", "tick-limit")

    @property
    def first_forged(self) -> AckRecord | None:
        return next((a for a in self.acks if a.claims_undelivered), None)

    @property
    def forged_acks_accepted(self) -> int:
        return sum(a.claims_undelivered and a.verdict == Verdict.ACCEPT.value for a in self.acks)

    def records(self) -> list[dict]:
        out = [{
            "type": "session",
            "name": self.name,
            "scheme": self.scheme,
            "behavior": self.behavior,
            "seed": self.seed,
            "n": self.n,
            "segment_len": self.segment_len,
            "tag_bytes": self.tag_bytes,
            "proof_bytes": self.proof_bytes,
        }]
        out += [a.record() for a in self.acks]
        out.append({
            "type": "summary",
            "seed": self.seed,
            "delivered_bytes": self.delivered_bytes,
            "segments_sent": self.segments_sent,
            "retransmissions": self.retransmissions,
            "termination_tick": self.termination_tick,
            "termination_reason": self.termination_reason,
            "acks": len(self.acks),
            "forged_acks": sum(a.claims_undelivered for a in self.acks),
            "forged_acks_accepted": self.forged_acks_accepted,
            "cwnd_trace": [list(x) for x in self.cwnd_trace],
        })
        return out

    def to_text(self) -> str:
        lines = [REPORT_HEADER] + [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in self.records()]
        return "\n".join(lines) + "\n"


@dataclass
class _Packet:
    index: int
    segment: Segment
    tag: object
    first: bool


class _Simulation:
    def __init__(self, cfg: SimConfig):
        cfg.validate()
        self.cfg = cfg
        seed = cfg.seed
        self.key_rng = random.Random(f"{seed}:keys")
        self.loss_rng = random.Random(f"{seed}:loss")
        self.attack_rng = random.Random(f"{seed}:attacker")
        content = cfg.content if cfg.content is not None else random.Random(f"{seed}:content").randbytes(cfg.file_size)
        self.content = content
        self.file = FileRecord(cfg.fid, content)
        self.topo = cfg.topology
        # Agents start empty for every run.
        for a in self.topo.agents:
            a.records.clear()

        self.receiver_keypair = None
        self.receiver_secret = None
        if cfg.scheme == RPK:
            group = GROUPS[cfg.group]
            self.receiver_keypair = cfg.receiver_keypair or rpk_keygen(random.Random(f"{seed}:receiver"), group)
            self.receiver_secret = self.receiver_keypair.s
            if cfg.receiver_key == "wrong":
                wrong_rng = random.Random(f"{seed}:wrong-key")
                s = wrong_rng.randrange(1, group.q)
                while s == self.receiver_keypair.s:
                    s = wrong_rng.randrange(1, group.q)
                self.receiver_secret = s
        self.scheme: Scheme = make_scheme(cfg.scheme, cfg.modulus, prf=cfg.prf, hash=cfg.hash,
                                          receiver=self.receiver_keypair, prefix_cache=cfg.prefix_cache)
        self.params = SessionParams.for_content(len(content), cfg.segment_len,
                                                isn=self.key_rng.getrandbits(32), offset=1)
        self.segments = segment_file(self.file, self.params)
        self.sender = self.scheme.new_sender(self.key_rng)
        self.n = self.params.n

        self.harvest: dict[int, object] = {}
        if cfg.behavior == PLAYBACK:
            old_params = SessionParams.for_content(len(content), cfg.segment_len,
                                                   isn=self.key_rng.getrandbits(32), offset=1)
            old_sender = self.scheme.new_sender(self.key_rng)
            for s in segment_file(self.file, old_params):
                tag = old_sender.tag(s.index, s)
                self.harvest[s.index] = self.scheme.receiver_view(old_sender, s.index, s, tag)

        # sender state
        self.cwnd = cfg.initial_cwnd
        self.ssthresh = cfg.initial_ssthresh
        self.ca_count = 0
        self.next_index = 1
        self.acked: set[int] = set()
        self.unacked: set[int] = set()
        self.tags: dict[int, object] = {}
        self.sent_once: set[int] = set()
        self.dupacks = 0
        self.timer_gen = 0
        self.timer_armed = False
        self.segments_sent = 0
        self.retransmissions = 0
        self.packet_sizes: set[int] = set()
        self.cwnd_trace: list[tuple[int, int]] = [(0, self.cwnd)]

        # receiver state
        self.received: dict[int, tuple[Segment, object]] = {}
        self.max_seen = 0

        self.acks: list[AckRecord] = []
        self.events: list = []
        self.seq = 0
        self.done: tuple[int, str] | None = None
        self.trace: list[str] = []

    # -- plumbing
    def schedule(self, tick: int, kind: str, payload) -> None:
        heapq.heappush(self.events, (tick, self.seq, kind, payload))
        self.seq += 1

    def log(self, tick: int, msg: str) -> None:
        if self.cfg.trace:
            self.trace.append(f"{tick:6d} {msg}")

    def set_cwnd(self, tick: int, cwnd: int) -> None:
        cwnd = max(1, min(cwnd, self.cfg.w_max))
        if cwnd != self.cwnd:
            self.cwnd = cwnd
            self.cwnd_trace.append((tick, cwnd))

    # -- sender
    def transmit(self, i: int, tick: int) -> None:
        segment = self.segments[i - 1]
        if i not in self.tags:
            self.tags[i] = self.sender.tag(i, segment)
        tag = self.tags[i]
        first = i not in self.sent_once
        self.sent_once.add(i)
        self.segments_sent += 1
        if not first:
            self.retransmissions += 1
        self.packet_sizes.add(len(segment.to_bytes()) + len(tag.to_bytes()))
        self.unacked.add(i)
        self.log(tick, f"send {i}{'' if first else ' (retransmit)'} cwnd={self.cwnd}")
        self.at_node(_Packet(i, segment, tag, first), 0, tick)
        if not self.timer_armed:
            self.arm_timer(tick)

    def arm_timer(self, tick: int) -> None:
        self.timer_gen += 1
        self.timer_armed = True
        self.schedule(tick + self.cfg.rto_ticks, "rto", self.timer_gen)

    def fill_window(self, tick: int) -> None:
        window = min(self.cwnd, self.cfg.w_max)
        while self.next_index <= self.n and len(self.unacked) < window:
            if self.next_index not in self.acked:
                self.transmit(self.next_index, tick)
            self.next_index += 1

    def on_timeout(self, tick: int, gen: int) -> None:
        if gen != self.timer_gen or not self.timer_armed:
            return
        self.timer_armed = False
        if not self.unacked:
            return
        self.log(tick, "rto")
        self.loss_reaction(tick, "rto")

    def loss_reaction(self, tick: int, event: str) -> None:
        cwnd, self.ssthresh = retransmit_policy(self.cwnd, self.ssthresh, event)
        self.set_cwnd(tick, cwnd)
        self.ca_count = 0
        self.dupacks = 0
        self.transmit(min(self.unacked), tick)

    def on_ack(self, tick: int, ack: tuple) -> None:
        sent_tick, I, proof_bytes, claims_undelivered = ack
        proof = self.scheme.proof_from_bytes(proof_bytes)
        if any(not 1 <= i <= self.n for i in I):
            verdict = Verdict.UNKNOWN_INDEX
        else:
            verdict = self.sender.verify(I, proof)
        self.acks.append(AckRecord(sent_tick, tick, self.cfg.ack_mode, list(I), proof_bytes.hex(),
                                   verdict.value, claims_undelivered))
        self.log(tick, f"ack I={_ranges(I)} -> {verdict.value}")
        if not verdict.accepted:
            self.done = (tick, "proof-rejected" if verdict is Verdict.REJECT else "unknown-index")
            return
        new = set(I) - self.acked
        if new:
            self.acked |= new
            self.unacked -= new
            self.dupacks = 0
            for _ in new:
                if self.cwnd < self.ssthresh:
                    self.set_cwnd(tick, self.cwnd + 1)
                else:
                    self.ca_count += 1
                    if self.ca_count >= self.cwnd:
                        self.ca_count = 0
                        self.set_cwnd(tick, self.cwnd + 1)
            if len(self.acked) >= self.n:
                self.done = (tick, "complete")
                return
            self.timer_armed = False
            if self.unacked:
                self.arm_timer(tick)
        else:
            self.dupacks += 1
            if self.cfg.dupack_threshold and self.dupacks == self.cfg.dupack_threshold and self.unacked:
                self.log(tick, "triple duplicate ack")
                self.loss_reaction(tick, "dupack")
        self.fill_window(tick)

    # -- path
    def at_node(self, pkt: _Packet, k: int, tick: int) -> None:
        if k == self.topo.hops:
            self.at_receiver(pkt, tick)
            return
        for agent in self.topo.agents:
            if agent.position == k:
                agent.observe(pkt.index, pkt.segment, pkt.tag)
        if k == self.topo.mav_position:
            pkt.tag = self.scheme.receiver_view(self.sender, pkt.index, pkt.segment, pkt.tag)
        link = self.topo.links[k]
        drop_link = self.topo.hops - 1 if self.topo.drop_link is None else self.topo.drop_link
        dropped = pkt.first and k == drop_link and pkt.index in self.topo.drops
        if not dropped and link.loss > 0:
            dropped = self.loss_rng.random() < link.loss
        if dropped:
            self.log(tick, f"drop {pkt.index} on link {k}")
            return
        self.schedule(tick + 1 + link.latency, "arrive", (pkt, k + 1))

    # -- receiver
    def at_receiver(self, pkt: _Packet, tick: int) -> None:
        self.received.setdefault(pkt.index, (pkt.segment, pkt.tag))
        self.max_seen = max(self.max_seen, pkt.index)
        self.log(tick, f"recv {pkt.index}")
        I, proof = self.build_ack()
        claims_undelivered = any(i not in self.received for i in I)
        self.schedule(tick + self.topo.reverse_delay, "ack", (tick, I, proof.to_bytes(), claims_undelivered))

    def build_ack(self):
        cfg = self.cfg
        if cfg.behavior == HONEST:
            if cfg.ack_mode == CUMULATIVE:
                r = 0
                while r + 1 in self.received:
                    r += 1
                I = list(range(1, r + 1))
            else:
                I = sorted(self.received)
            proof = self.scheme.prove([self.received[i] for i in I], key=self.receiver_secret)
            return I, proof
        # Optimistic and playback attackers claim everything up to the
        # highest index seen (plus ``lead``), filling holes as best they can.
        top = self.max_seen + cfg.lead
        I = list(range(1, top + 1))
        held = [self.received[i] for i in I if i in self.received]
        proof = self.scheme.prove(held, key=self.receiver_secret)
        for i in I:
            if i not in self.received:
                proof = proof + self.forge(i)
        return I, proof

    def forge(self, i: int):
        segment, tag = None, None
        for agent in self.topo.agents:
            rec = agent.records.get(i)
            if rec is not None:
                seg, t = rec
                tag = t
                if seg is not None:
                    segment = seg
                    break
        if self.cfg.behavior == PLAYBACK and i in self.harvest and tag is None:
            tag = self.harvest[i]
        if segment is None and 1 <= i <= self.n and (self.cfg.knows_content or self.cfg.behavior == PLAYBACK):
            segment = make_segment(self.content, i, self.params)
        return self.scheme.contribution(segment, tag, self.attack_rng, key=self.receiver_secret)

    # -- main loop
    def run(self) -> SimReport:
        self.fill_window(0)
        tick = 0
        while self.events and self.done is None:
            tick, _, kind, payload = heapq.heappop(self.events)
            if tick > self.cfg.max_ticks:
                self.done = (self.cfg.max_ticks, "tick-limit")
                break
            if kind == "arrive":
                pkt, k = payload
                self.at_node(pkt, k, tick)
            elif kind == "ack":
                self.on_ack(tick, payload)
            elif kind == "rto":
                self.on_timeout(tick, payload)
        if self.done is None:
            self.done = (tick, "stalled")
        l = self.cfg.segment_len
        delivered = sum(min(l, len(self.content) - (i - 1) * l) for i in self.received)
        tag_bytes = len(self.tags[min(self.tags)].to_bytes())
        return SimReport(
            name=self.cfg.name,
            scheme=self.cfg.scheme,
            behavior=self.cfg.behavior,
            seed=self.cfg.seed,
            n=self.n,
            segment_len=l,
            tag_bytes=tag_bytes,
            proof_bytes=len(self.scheme.zero_proof().to_bytes()),
            packet_sizes=sorted(self.packet_sizes),
            acks=self.acks,
            delivered_bytes=delivered,
            segments_sent=self.segments_sent,
            retransmissions=self.retransmissions,
            termination_tick=self.done[0],
            termination_reason=self.done[1],
            cwnd_trace=self.cwnd_trace,
            trace=self.trace,
        )


def simulate(cfg: SimConfig) -> SimReport:
    """Run one transfer.  Identical configs (seed included) give identical reports."""
    return _Simulation(cfg).run()


def retransmit_policy(cwnd: int, ssthresh: int, event: str) -> tuple[int, int]:
    """(cwnd, ssthresh) after a loss event ("rto" or "dupack"); Tahoe rule."""
    if event not in ("rto", "dupack"):
        raise ValueError(f"unknown loss event {event!r}")
    return 1, max(cwnd // 2, 1)
