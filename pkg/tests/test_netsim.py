import random

import pytest

from vsr.field import P80, P251
from vsr.netsim import (CUMULATIVE, FULL, HONEST, OPTIMISTIC, PLAYBACK, SACK, TAG_ONLY, ConfigError, Link,
                        SimConfig, Topology, place_agent, retransmit_policy, simulate)
from vsr.overhead import measure


def _cfg(**kw):
    topo = kw.pop("topology", None) or Topology([Link() for _ in range(3)])
    base = dict(scheme="vsr-aa", file_size=8 * 128, segment_len=128, topology=topo, seed=1)
    base.update(kw)
    return SimConfig(**base)


def test_zero_loss_honest_completes():
    r = simulate(_cfg())
    assert r.termination_reason == "complete"
    assert r.delivered_bytes == 8 * 128
    assert all(a.verdict == "accept" for a in r.acks)
    assert r.retransmissions == 0


def test_drop3_cumulative_holds_at_two_until_retransmission():
    topo = Topology([Link() for _ in range(3)], drops=frozenset({3}))
    r = simulate(_cfg(topology=topo, trace=True))
    assert r.termination_reason == "complete"
    assert all(a.verdict == "accept" for a in r.acks)
    retransmit_tick = next(int(line.split()[0]) for line in r.trace if "retransmit" in line)
    early = [a for a in r.acks if a.sent_tick <= retransmit_tick and a.I != [1]]
    assert early and all(a.I == [1, 2] for a in early)
    assert r.acks[-1].I == list(range(1, 9))


def test_retransmission_reuses_tag_bytes():
    topo = Topology([Link() for _ in range(2)], drops=frozenset({2}))
    cfg = _cfg(topology=topo, trace=True, scheme="vsr-h")
    from vsr.netsim import _Simulation
    sim = _Simulation(cfg)
    sent = []
    orig = sim.at_node

    def spy(pkt, k, tick):
        if k == 0:
            sent.append((pkt.index, pkt.tag.to_bytes()))
        orig(pkt, k, tick)

    sim.at_node = spy
    sim.run()
    tags2 = {t for i, t in sent if i == 2}
    assert len([1 for i, _ in sent if i == 2]) == 2 and len(tags2) == 1


def test_sack_mode_and_duplicate_delivery():
    topo = Topology([Link(loss=0.2) for _ in range(3)])
    r = simulate(_cfg(topology=topo, ack_mode=SACK, seed=5))
    assert r.termination_reason == "complete"
    assert all(a.verdict == "accept" for a in r.acks)


def test_retransmit_policy():
    assert retransmit_policy(8, 16, "rto") == (1, 4)
    assert retransmit_policy(1, 16, "dupack") == (1, 1)
    with pytest.raises(ValueError):
        retransmit_policy(8, 16, "other")


def test_honest_receiver_never_terminated():
    rng = random.Random(0)
    for seed in range(1000):
        scheme = rng.choice(["vsr-h", "vsr-aa", "vsr-aa-rpk"])
        topo = Topology([Link(loss=rng.choice([0.0, 0.05, 0.2]), latency=rng.randint(0, 2))
                         for _ in range(rng.randint(1, 4))])
        cfg = _cfg(scheme=scheme, topology=topo, file_size=rng.randint(1, 3000), segment_len=rng.randint(64, 600),
                   ack_mode=rng.choice([CUMULATIVE, SACK]), seed=seed)
        r = simulate(cfg)
        assert r.termination_reason == "complete", (seed, r.termination_reason)


def test_optimistic_acker_detected_mostly():
    topo = lambda: Topology([Link() for _ in range(4)], drops=frozenset({3}))
    accepted = sum(simulate(_cfg(topology=topo(), behavior=OPTIMISTIC, seed=s)).forged_acks_accepted > 0
                   for s in range(500))
    assert accepted <= 10


def test_agents_capture_what_they_can():
    topo = Topology([Link() for _ in range(4)], drops=frozenset({3}))
    place_agent(topo, 1, TAG_ONLY)
    assert simulate(_cfg(scheme="savage", topology=topo, behavior=OPTIMISTIC)).forged_acks_accepted > 0
    topo = Topology([Link() for _ in range(4)], drops=frozenset({3}))
    place_agent(topo, 1, FULL)
    assert simulate(_cfg(scheme="vsr-aa", topology=topo, behavior=OPTIMISTIC)).forged_acks_accepted > 0


def test_mav_placement():
    def run(hop, seed):
        topo = Topology([Link() for _ in range(4)], drops=frozenset({3}), mav_position=2)
        place_agent(topo, hop, FULL)
        return simulate(_cfg(scheme="vsr-aa-mav", topology=topo, behavior=OPTIMISTIC, seed=seed))
    assert all(run(3, s).forged_acks_accepted > 0 for s in range(50))
    assert sum(run(1, s).forged_acks_accepted > 0 for s in range(300)) <= 6


def test_playback_attacker_detected():
    topo = Topology([Link() for _ in range(3)], drops=frozenset({4}))
    r = simulate(_cfg(topology=topo, behavior=PLAYBACK, seed=2))
    assert r.first_forged is not None and r.terminated


def test_config_errors():
    with pytest.raises(ConfigError):
        simulate(_cfg(topology=Topology([])))
    with pytest.raises(ConfigError):
        simulate(_cfg(scheme="vsr-aa-mav"))
    with pytest.raises(ConfigError):
        simulate(_cfg(topology=Topology([Link()], mav_position=1)))
    with pytest.raises(ConfigError):
        place_agent(Topology([Link()]), 3)
    with pytest.raises(ConfigError):
        simulate(_cfg(behavior="sleepy"))
    with pytest.raises(ConfigError):
        simulate(_cfg(file_size=0))


def test_determinism_byte_identical():
    topo = lambda: Topology([Link(loss=0.1, latency=1) for _ in range(3)])
    a = simulate(_cfg(topology=topo(), seed=9)).to_text()
    b = simulate(_cfg(topology=topo(), seed=9)).to_text()
    c = simulate(_cfg(topology=topo(), seed=10)).to_text()
    assert a == b and a != c


@pytest.mark.parametrize("scheme", ["savage", "vsr-h", "vsr-aa", "vsr-aa-rpk"])
def test_wire_sizes_match_overhead_report(scheme):
    r = simulate(_cfg(scheme=scheme, modulus=P80, group="desk128", segment_len=536, file_size=536 * 3))
    o = measure(scheme, 80, 536, window=3)
    assert r.tag_bytes == o.tag_bytes and r.proof_bytes == o.proof_bytes
    assert r.packet_sizes == [40 + 536 + o.tag_bytes]
