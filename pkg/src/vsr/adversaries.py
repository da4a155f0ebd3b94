"""Adversary strategies for the security games.

All of them play the receiver: they segment-query every challenge index but
one (``j``), then claim the whole file.  They differ only in what they use for
the missing contribution.
"""
from __future__ import annotations

from .game import KFC, TA, Adversary, Challenger, GameRuleViolation, Session
from .mitm import mav_unblind
from .segmentation import make_segment


class _ClaimAll(Adversary):
    def query2(self, ch: Challenger, session: Session) -> None:
        self.missing = self.rng.randint(1, session.n)
        self.held = [session.segment_query(i) for i in range(1, session.n + 1) if i != self.missing]

    def missing_contribution(self, ch: Challenger, session: Session):
        raise NotImplementedError

    def guess(self, ch, session):
        scheme = ch.scheme
        proof = scheme.prove(self.held, key=ch.receiver_private) + self.missing_contribution(ch, session)
        return set(range(1, session.n + 1)), proof


class BlindForger(_ClaimAll):
    """Uniform guess for the missing segment's contribution."""

    id = "blind-forger"

    def missing_contribution(self, ch, session):
        return ch.scheme.random_proof(self.rng)


class HonestMissing(_ClaimAll):
    """Honest receiver that claims one lost segment and simply leaves it out."""

    id = "honest-missing"

    def missing_contribution(self, ch, session):
        return ch.scheme.zero_proof()


class TagAccess(_ClaimAll):
    """Obtains the lost segment's tag (not its content) and uses it."""

    id = "tag-access"
    notion = TA

    def query2(self, ch, session):
        super().query2(ch, session)
        self.tag = session.tag_access(self.missing)

    def missing_contribution(self, ch, session):
        return ch.scheme.contribution(None, self.tag, self.rng, key=ch.receiver_private)


class Playback(_ClaimAll):
    """Downloads the challenge file honestly first, then reuses that session's
    tag for the missing index (with the segment rebuilt for the new header)."""

    id = "playback"
    notion = KFC

    def query1(self, ch):
        self.fid = self.rng.choice(ch.fids)
        self.old = ch.playback(self.fid, ch.config.segment_len)

    def choose_challenge(self, ch):
        return self.fid, ch.config.segment_len

    def missing_contribution(self, ch, session):
        j = self.missing
        content = b"".join(s.payload for s, _ in self.old.pairs)
        segment = make_segment(content, j, session.params)
        old_tag = self.old.pairs[j - 1][1]
        return ch.scheme.contribution(segment, old_tag, self.rng, key=ch.receiver_private)


class RandomProof(Adversary):
    """No queries at all; a uniformly random proof over a random prefix."""

    id = "random-proof"

    def guess(self, ch, session):
        r = self.rng.randint(1, session.n)
        return set(range(1, r + 1)), ch.scheme.random_proof(self.rng)


class Greedy(Adversary):
    """Queries every segment and proves what it holds.  Breaks the win rule."""

    id = "greedy"

    def query2(self, ch, session):
        self.held = [session.segment_query(i) for i in range(1, session.n + 1)]

    def guess(self, ch, session):
        return set(range(1, session.n + 1)), ch.scheme.prove(self.held, key=ch.receiver_private)


class KfcTagPeek(TagAccess):
    """Tag access on the challenge session under KFC: refused by the harness."""

    id = "kfc-tag-peek"
    notion = KFC


class MavKeyOracle(_ClaimAll):
    """MAV only: captures the blinded tag of the lost segment and asks for its
    verifier key, then claims it anyway (forbidden)."""

    id = "mav-key-oracle"
    notion = TA

    def query2(self, ch, session):
        super().query2(ch, session)
        self.tag = session.tag_access(self.missing)
        self.g = session.verifier_key(self.missing)

    def missing_contribution(self, ch, session):
        return ch.scheme.contribution(None, mav_unblind(self.tag, self.g), self.rng)


ADVERSARIES = {cls.id: cls for cls in (BlindForger, HonestMissing, TagAccess, Playback, RandomProof, Greedy,
                                       KfcTagPeek, MavKeyOracle)}

__all__ = ["ADVERSARIES", "GameRuleViolation"] + [c.__name__ for c in ADVERSARIES.values()]
