"""Round-level simulation of the authentication exchange.

Two wire formats are simulated.  The *plain* variant is the classic
two-message exchange: the sender transmits a message and its tag, and an
adversary holding partial key knowledge may observe both before deciding
whether to substitute her own pair.  The *salted* variant inserts a
receiver-chosen random salt between message and tag: the tag then covers
``message || salt``, so any replacement of the message (or of the salt)
is committed before the tag ever exists.  That commitment is what the
salted variant buys: the adversary's success falls back to the
``min(1, epsilon/r)`` ceiling no matter how she steers the exchange.

Adversary strategies:

* ``PASSIVE`` observes and forwards; it calibrates the honest channel.
* ``BLIND_GUESS`` replaces the message and guesses a uniform tag.
* ``INTERCEPT_CERTAIN`` substitutes only when the observed pair leaves a
  guaranteed forgery (``capability="concrete"`` demands an actual
  message all surviving keys agree on; ``capability="oracle"`` counts
  every round where the surviving class is small enough, the worst-case
  model).
* ``ENGINEERED`` additionally steers which message gets authenticated.
  ``partition="searched"`` runs the steering against the concrete family
  (:func:`wcauth.keyspace.craft_influenced_message`);
  ``partition="idealized"`` samples the analytic best-case partition
  model directly and is the strategy that exhibits the plain variant's
  amplified break probability.

Campaigns (:func:`monte_carlo`) route eligible configurations to the
compiled Monte Carlo kernels and fall back to per-round simulation
otherwise; both paths draw their randomness from the configured master
seed, so every reported number is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from . import kernels
from .bounds import BoundParams, weak_pair_prob_exact
from .errors import ConfigError, DomainError
from .families import FamilyShape, HashFamily, as_fraction, family_from_json, family_to_json
from .keyspace import (
    KeySet,
    certain_forgery,
    constraint_set,
    craft_influenced_message,
    forgeable_messages,
    intersect,
    random_elimination,
)

AnyFamily = Union[HashFamily, FamilyShape]


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def concat_for_tag(message: int, salt: int, salt_bits: int,
                   num_messages: Optional[int] = None) -> int:
    """Pack ``message`` and ``salt`` into the input the tag covers.

    The message occupies the high bits and the salt the low ``salt_bits``
    bits: ``(message << salt_bits) | salt``.  With ``salt_bits=0`` (the
    plain variant) this is the identity on the message.

    Raises
    ------
    DomainError
        If the salt does not fit in ``salt_bits``, either part is
        negative, or the packed value falls outside the hash family's
        message space (when ``num_messages`` is given).
    """
    if salt_bits < 0:
        raise DomainError("salt_bits must be non-negative")
    if message < 0:
        raise DomainError("message must be non-negative")
    if not 0 <= salt < (1 << salt_bits) or (salt_bits == 0 and salt != 0):
        raise DomainError(f"salt {salt} does not fit in {salt_bits} bits")
    packed = (message << salt_bits) | salt
    if num_messages is not None and packed >= num_messages:
        raise DomainError(
            f"packed input {packed} outside message space of {num_messages}"
        )
    return packed


@dataclass(frozen=True)
class ProtocolVariant:
    """Wire format: ``plain`` or ``salted`` (with salt/payload widths).

    For the salted variant, ``salt_bits`` defaults to the tag length
    ``ceil(log2(num_tags))`` and must not be smaller (a salt shorter
    than the tag leaves residual freedom after commitment);
    ``payload_bits`` defaults to the widest payload that still packs
    into the family's message space.
    """

    kind: str
    salt_bits: Optional[int] = None
    payload_bits: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("plain", "salted"):
            raise ConfigError(f"unknown variant kind {self.kind!r}")
        if self.kind == "plain" and (
            self.salt_bits not in (None, 0) or self.payload_bits is not None
        ):
            raise ConfigError("plain variant takes no salt or payload width")

    @classmethod
    def plain(cls) -> "ProtocolVariant":
        return cls("plain")

    @classmethod
    def salted(cls, salt_bits: Optional[int] = None,
               payload_bits: Optional[int] = None) -> "ProtocolVariant":
        return cls("salted", salt_bits=salt_bits, payload_bits=payload_bits)

    def resolve(self, family: HashFamily) -> tuple[int, int]:
        """Concrete ``(payload_bits, salt_bits)`` for ``family``."""
        if self.kind == "plain":
            return (0, 0)
        salt_bits = self.salt_bits
        if salt_bits is None:
            salt_bits = _ceil_log2(family.num_tags)
        if (1 << salt_bits) < family.num_tags:
            raise ConfigError(
                f"salt_bits={salt_bits} is shorter than the tag length "
                f"({_ceil_log2(family.num_tags)} bits)"
            )
        payload_bits = self.payload_bits
        if payload_bits is None:
            payload_bits = family.num_messages.bit_length() - 1 - salt_bits
        if payload_bits < 1:
            raise ConfigError("no room for a payload next to the salt")
        if (1 << (payload_bits + salt_bits)) > family.num_messages:
            raise ConfigError(
                f"payload_bits+salt_bits={payload_bits + salt_bits} does not "
                f"fit the {family.num_messages}-message space"
            )
        return (payload_bits, salt_bits)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.salt_bits is not None:
            out["salt_bits"] = self.salt_bits
        if self.payload_bits is not None:
            out["payload_bits"] = self.payload_bits
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ProtocolVariant":
        return cls(
            kind=data.get("kind", "plain"),
            salt_bits=data.get("salt_bits"),
            payload_bits=data.get("payload_bits"),
        )


_STRATEGY_KINDS = ("passive", "blind_guess", "intercept_certain", "engineered")


@dataclass(frozen=True)
class AdversaryStrategy:
    """What the adversary tries each round and which model she runs in."""

    kind: str
    capability: str = "concrete"
    partition: str = "searched"
    delay_message: bool = False

    def __post_init__(self):
        if self.kind not in _STRATEGY_KINDS:
            raise ConfigError(f"unknown strategy kind {self.kind!r}")
        if self.capability not in ("concrete", "oracle"):
            raise ConfigError(f"unknown capability {self.capability!r}")
        if self.partition not in ("searched", "idealized"):
            raise ConfigError(f"unknown partition mode {self.partition!r}")
        if self.kind == "engineered" and self.partition == "idealized":
            if self.capability != "oracle":
                # the idealized model assigns success analytically; a
                # "concrete" idealized adversary has no meaning
                raise ConfigError(
                    "idealized partition requires capability='oracle'"
                )
        if self.delay_message and self.kind != "engineered":
            raise ConfigError("delay_message applies only to engineered")

    @classmethod
    def passive(cls) -> "AdversaryStrategy":
        return cls("passive")

    @classmethod
    def blind_guess(cls) -> "AdversaryStrategy":
        return cls("blind_guess")

    @classmethod
    def intercept_certain(cls, capability: str = "concrete") -> "AdversaryStrategy":
        return cls("intercept_certain", capability=capability)

    @classmethod
    def engineered(cls, partition: str = "searched",
                   capability: str = "concrete",
                   delay_message: bool = False) -> "AdversaryStrategy":
        return cls("engineered", capability=capability, partition=partition,
                   delay_message=delay_message)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "capability": self.capability}
        if self.kind == "engineered":
            out["partition"] = self.partition
            out["delay_message"] = self.delay_message
        return out

    @classmethod
    def from_json(cls, data: dict) -> "AdversaryStrategy":
        return cls(
            kind=data.get("kind", "passive"),
            capability=data.get("capability", "concrete"),
            partition=data.get("partition", "searched"),
            delay_message=data.get("delay_message", False),
        )


@dataclass(frozen=True)
class RoundTranscript:
    """Ordered wire events of one round, plus the adversary's key views.

    Events are ``(kind, payload)`` pairs in wire order; kinds are
    ``eve_influences``, ``alice_sends``, ``bob_sends``, ``eve_observes``,
    ``eve_replaces``, ``channel_noise``, and ``bob_verdict``.  Field
    values are ``None`` in model-level (oracle/idealized) rounds where no
    concrete value exists.
    """

    variant: str
    strategy: dict
    true_key: Optional[int]
    events: tuple[tuple[str, dict], ...]
    eve_keys_before: Optional[list[int]] = None
    eve_keys_after: Optional[list[int]] = None

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "strategy": self.strategy,
            "true_key": self.true_key,
            "events": [[kind, dict(payload)] for kind, payload in self.events],
            "eve_keys_before": self.eve_keys_before,
            "eve_keys_after": self.eve_keys_after,
        }


@dataclass(frozen=True)
class RoundOutcome:
    """What the round meant for each party.

    ``forgery_accepted``: the receiver accepted a message the sender
    never sent.  ``honest_accepted``: the sender's own message arrived
    intact and was accepted.  ``eve_attempted``: the adversary altered
    something.  ``eve_detected``: she altered something and the receiver
    rejected.  ``forgery_accepted or eve_detected`` implies
    ``eve_attempted``.
    """

    forgery_accepted: bool
    honest_accepted: bool
    eve_attempted: bool
    eve_detected: bool

    def to_json(self) -> dict:
        return {
            "forgery_accepted": self.forgery_accepted,
            "honest_accepted": self.honest_accepted,
            "eve_attempted": self.eve_attempted,
            "eve_detected": self.eve_detected,
        }


@dataclass(frozen=True)
class Prediction:
    """Analytic reference value a campaign is compared against."""

    kind: str  # "exact" | "upper_bound"
    log2: float
    description: str
    fraction: Optional[Fraction] = None

    @property
    def value(self) -> float:
        return 0.0 if self.log2 == -math.inf else 2.0**self.log2

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "log2": self.log2,
            "value": self.value,
            "fraction": None if self.fraction is None else str(self.fraction),
            "description": self.description,
        }


def _wilson_interval(successes: int, trials: int,
                     z: float = 1.959963984540054) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
        / denom
    )
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class SuccessStats:
    """Aggregate results of a campaign.

    ``success_rate`` is forgeries per round (not per attempt): that is
    the quantity the analytic per-round formulas predict.  The Wilson
    bounds give a 95 percent interval for it.
    """

    trials: int
    attempts: int
    forgeries: int
    detections: int
    honest_accepted: int
    prediction: Optional[Prediction]
    backend: str
    method: str

    @property
    def success_rate(self) -> float:
        return self.forgeries / self.trials if self.trials else 0.0

    @property
    def wilson_interval(self) -> tuple[float, float]:
        return _wilson_interval(self.forgeries, self.trials)

    def prediction_sigma(self) -> Optional[float]:
        """Binomial standard error at the predicted rate."""
        if self.prediction is None or self.trials == 0:
            return None
        p = self.prediction.value
        return math.sqrt(p * (1 - p) / self.trials)

    def agrees_with_prediction(self, n_sigma: float = 3.0) -> Optional[bool]:
        """Compare the empirical rate with the prediction.

        Exact predictions must match within ``n_sigma`` binomial standard
        errors; upper bounds must not be exceeded by more than
        ``n_sigma``.  Returns ``None`` when there is no prediction.
        """
        if self.prediction is None:
            return None
        p = self.prediction.value
        sigma = self.prediction_sigma() or 0.0
        if self.prediction.kind == "exact":
            return abs(self.success_rate - p) <= n_sigma * sigma
        return self.success_rate <= p + n_sigma * sigma

    def to_json(self) -> dict:
        low, high = self.wilson_interval
        agrees = self.agrees_with_prediction()
        return {
            "trials": self.trials,
            "attempts": self.attempts,
            "forgeries": self.forgeries,
            "detections": self.detections,
            "honest_accepted": self.honest_accepted,
            "success_rate": self.success_rate,
            "wilson_low": low,
            "wilson_high": high,
            "prediction": None if self.prediction is None else self.prediction.to_json(),
            "agrees_with_prediction": agrees,
            "backend": self.backend,
            "method": self.method,
        }


@dataclass(frozen=True)
class SimConfig:
    """Everything a campaign needs, serializable to one JSON object."""

    family: AnyFamily
    variant: ProtocolVariant
    strategy: AdversaryStrategy
    r: Union[Fraction, float]
    trials: int
    master_seed: int
    noise: float = 0.0
    allow_message_influence: bool = False
    method: str = "auto"

    def __post_init__(self):
        if self.trials < 0:
            raise ConfigError("trials must be non-negative")
        if not 0.0 <= self.noise < 1.0:
            raise ConfigError("noise must lie in [0, 1)")
        if self.method not in ("auto", "kernel", "round"):
            raise ConfigError(f"unknown method {self.method!r}")
        if isinstance(self.r, str):
            object.__setattr__(self, "r", as_fraction(self.r))
        if not 0 < float(self.r) <= 1:
            raise ConfigError("knowledge fraction r must lie in (0, 1]")
        if self.strategy.kind == "engineered" and not self.allow_message_influence:
            raise ConfigError(
                "engineered strategies need allow_message_influence=true"
            )

    def to_json(self) -> dict:
        return {
            "family": family_to_json(self.family),
            "variant": self.variant.to_json(),
            "strategy": self.strategy.to_json(),
            "r": str(self.r) if isinstance(self.r, Fraction) else self.r,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "noise": self.noise,
            "allow_message_influence": self.allow_message_influence,
            "method": self.method,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SimConfig":
        try:
            family = family_from_json(data["family"])
            variant = ProtocolVariant.from_json(data.get("variant", {}))
            strategy = AdversaryStrategy.from_json(data.get("strategy", {}))
            r = data["r"]
            if isinstance(r, str):
                r = as_fraction(r)
            return cls(
                family=family,
                variant=variant,
                strategy=strategy,
                r=r,
                trials=int(data["trials"]),
                master_seed=int(data["master_seed"]),
                noise=float(data.get("noise", 0.0)),
                allow_message_influence=bool(
                    data.get("allow_message_influence", False)
                ),
                method=data.get("method", "auto"),
            )
        except KeyError as exc:
            raise ConfigError(f"simulation config missing field {exc}") from exc


# -- per-round simulation ------------------------------------------------------


def _surviving_count(num_keys: int, r) -> int:
    surviving = round(as_fraction(r) * num_keys)
    if surviving < 1:
        raise DomainError(f"r={r} rounds to an empty surviving set")
    return surviving


def _good_mass(num_keys: int, surviving: int, epsilon: Fraction) -> Fraction:
    """Surviving keys in certainty classes under the idealized partition.

    The adversary packs the ``num_keys - surviving`` excluded keys into
    full classes of ``(1-epsilon)*H/T`` each, which leaves
    ``(num_keys - surviving) * epsilon / (1 - epsilon)`` surviving keys
    in certainty-grade classes (clamped to the survivor count).
    """
    if epsilon == 1:
        raise DomainError("idealized partition needs epsilon < 1")
    mass = (num_keys - surviving) * epsilon / (1 - epsilon)
    return min(mass, Fraction(surviving))


def run_round(
    family: AnyFamily,
    variant: ProtocolVariant,
    strategy: AdversaryStrategy,
    r,
    rng: np.random.Generator,
    *,
    noise: float = 0.0,
    allow_message_influence: bool = False,
    true_key: Optional[int] = None,
    eve_keys: Optional[KeySet] = None,
    alice_message: Optional[int] = None,
    collect_keysets: bool = True,
) -> tuple[RoundTranscript, RoundOutcome]:
    """Simulate one authentication round and report what happened.

    ``true_key``, ``eve_keys``, and ``alice_message`` override the random
    draws (useful for exhaustive enumeration); when ``eve_keys`` is given
    it must contain the true key.  Model-level strategies
    (``partition="idealized"``) accept a :class:`FamilyShape` in place of
    a concrete family.
    """
    if strategy.kind == "engineered" and not allow_message_influence:
        raise ConfigError(
            "engineered strategies need allow_message_influence=true"
        )
    if not 0.0 <= noise < 1.0:
        raise DomainError("noise must lie in [0, 1)")

    if strategy.kind == "engineered" and strategy.partition == "idealized":
        return _idealized_round(family, variant, strategy, r, rng)

    if isinstance(family, FamilyShape):
        raise ConfigError(
            "a FamilyShape carries no tag table; only idealized strategies "
            "can run against it"
        )

    if true_key is None:
        true_key = int(rng.integers(family.num_keys))
    elif not 0 <= true_key < family.num_keys:
        raise DomainError(f"true_key {true_key} outside the key space")
    if eve_keys is None:
        eve_keys = random_elimination(family, true_key, r, rng)
    elif true_key not in eve_keys:
        raise DomainError("eve_keys override must contain the true key")

    if variant.kind == "plain":
        return _plain_round(
            family, variant, strategy, rng,
            noise=noise, true_key=true_key, eve_keys=eve_keys,
            alice_message=alice_message, collect_keysets=collect_keysets,
        )
    return _salted_round(
        family, variant, strategy, rng,
        noise=noise, true_key=true_key, eve_keys=eve_keys,
        alice_message=alice_message, collect_keysets=collect_keysets,
    )


def _majority_tag(posterior: KeySet, message: int) -> int:
    """Most common tag for ``message`` among surviving keys (ties: lowest)."""
    family = posterior.family
    tags = family.tag_table()[posterior.indices(), message]
    counts = np.bincount(tags, minlength=family.num_tags)
    return int(np.argmax(counts))


def _plain_round(family, variant, strategy, rng, *, noise, true_key,
                 eve_keys, alice_message, collect_keysets):
    events: list[tuple[str, dict]] = []
    cap = _certainty_cap_floor(family)

    if alice_message is not None:
        if not 0 <= alice_message < family.num_messages:
            raise DomainError("alice_message outside the message space")
        m_alice = alice_message
    elif strategy.kind == "engineered":
        crafted = craft_influenced_message(eve_keys)
        m_alice = (
            crafted if crafted is not None
            else int(rng.integers(family.num_messages))
        )
        events.append(
            ("eve_influences", {"field": "message", "value": m_alice})
        )
    else:
        m_alice = int(rng.integers(family.num_messages))

    tag_alice = family.eval_tag(true_key, m_alice)
    events.append(("alice_sends", {"field": "message", "value": m_alice}))
    events.append(("alice_sends", {"field": "tag", "value": tag_alice}))
    events.append(("eve_observes", {"field": "message", "value": m_alice}))
    events.append(("eve_observes", {"field": "tag", "value": tag_alice}))

    posterior = intersect(eve_keys, constraint_set(family, m_alice, tag_alice))

    delivered_m, delivered_t = m_alice, tag_alice
    attempted = False
    modeled_success = None  # oracle rounds without a concrete witness

    if strategy.kind == "blind_guess":
        if family.num_messages < 2:
            raise ConfigError("blind guessing needs at least two messages")
        delivered_m = int(rng.integers(family.num_messages - 1))
        delivered_m += delivered_m >= m_alice
        delivered_t = int(rng.integers(family.num_tags))
        attempted = True
    elif strategy.kind in ("intercept_certain", "engineered"):
        if strategy.capability == "concrete":
            options = forgeable_messages(posterior, exclude_message=m_alice)
            if options:
                delivered_m, delivered_t = options[0]
                attempted = True
        else:
            if posterior.size <= cap:
                attempted = True
                options = forgeable_messages(posterior, exclude_message=m_alice)
                if options:
                    delivered_m, delivered_t = options[0]
                else:
                    # worst-case model: the class is small enough, so the
                    # round counts as a success even without a witness here
                    delivered_m, delivered_t = None, None
                    modeled_success = True

    if attempted:
        events.append(("eve_replaces", {
            "field": "message", "old": m_alice, "new": delivered_m,
        }))
        events.append(("eve_replaces", {
            "field": "tag", "old": tag_alice, "new": delivered_t,
        }))
    elif noise > 0 and rng.random() < noise:
        shift = 1 + int(rng.integers(family.num_tags - 1)) if family.num_tags > 1 else 0
        delivered_t = (delivered_t + shift) % family.num_tags
        events.append(("channel_noise", {"field": "tag", "value": delivered_t}))

    if modeled_success is not None:
        accept = True
        events.append(("bob_verdict", {"accept": True, "modeled": True}))
    else:
        accept = family.eval_tag(true_key, delivered_m) == delivered_t
        events.append(("bob_verdict", {"accept": accept}))

    outcome = RoundOutcome(
        forgery_accepted=attempted and accept,
        honest_accepted=(not attempted) and accept,
        eve_attempted=attempted,
        eve_detected=attempted and not accept,
    )
    transcript = RoundTranscript(
        variant=variant.kind,
        strategy=strategy.to_json(),
        true_key=true_key,
        events=tuple(events),
        eve_keys_before=eve_keys.to_json() if collect_keysets else None,
        eve_keys_after=posterior.to_json() if collect_keysets else None,
    )
    return transcript, outcome


def _certainty_cap_floor(family) -> int:
    cap = family.forgery_cell_cap()
    return cap.numerator // cap.denominator


def _salted_round(family, variant, strategy, rng, *, noise, true_key,
                  eve_keys, alice_message, collect_keysets):
    payload_bits, salt_bits = variant.resolve(family)
    num_payloads = 1 << payload_bits
    num_salts = 1 << salt_bits
    events: list[tuple[str, dict]] = []

    if alice_message is not None:
        if not 0 <= alice_message < num_payloads:
            raise DomainError("alice_message outside the payload space")
        m_alice = alice_message
    elif strategy.kind == "engineered":
        crafted, mass = _craft_salted_payload(
            eve_keys, num_payloads, num_salts, salt_bits
        )
        m_alice = crafted if mass > 0 else int(rng.integers(num_payloads))
        events.append(
            ("eve_influences", {"field": "message", "value": m_alice})
        )
    else:
        m_alice = int(rng.integers(num_payloads))

    events.append(("alice_sends", {"field": "message", "value": m_alice}))
    events.append(("eve_observes", {"field": "message", "value": m_alice}))

    if strategy.kind == "engineered" and strategy.delay_message:
        return _salted_delayed_tail(
            family, variant, strategy, rng, events,
            true_key=true_key, eve_keys=eve_keys, m_alice=m_alice,
            num_payloads=num_payloads, num_salts=num_salts,
            salt_bits=salt_bits, collect_keysets=collect_keysets,
        )

    # --- the adversary commits to any message replacement here, before
    # --- the tag exists; this ordering is the point of the salted variant
    attempted = False
    m_bob = m_alice

    if strategy.kind == "blind_guess":
        if num_payloads < 2:
            raise ConfigError("blind guessing needs at least two payloads")
        m_bob = int(rng.integers(num_payloads - 1))
        m_bob += m_bob >= m_alice
        attempted = True
        events.append(("eve_replaces", {
            "field": "message", "old": m_alice, "new": m_bob,
        }))
    elif strategy.kind == "engineered":
        m_bob, _ = _craft_salted_payload(
            eve_keys, num_payloads, num_salts, salt_bits, exclude=m_alice
        )
        attempted = True
        events.append(("eve_replaces", {
            "field": "message", "old": m_alice, "new": m_bob,
        }))

    salt_bob = int(rng.integers(num_salts))
    events.append(("bob_sends", {"field": "salt", "value": salt_bob}))
    events.append(("eve_observes", {"field": "salt", "value": salt_bob}))

    tag_input_alice = concat_for_tag(
        m_alice, salt_bob, salt_bits, family.num_messages
    )
    tag_alice = family.eval_tag(true_key, tag_input_alice)
    events.append(("alice_sends", {"field": "tag", "value": tag_alice}))
    events.append(("eve_observes", {"field": "tag", "value": tag_alice}))

    posterior = intersect(
        eve_keys, constraint_set(family, tag_input_alice, tag_alice)
    )

    tag_bob = tag_alice
    if strategy.kind == "engineered":
        target = concat_for_tag(m_bob, salt_bob, salt_bits, family.num_messages)
        forced = certain_forgery(posterior, target)
        tag_bob = forced if forced is not None else _majority_tag(posterior, target)
        events.append(("eve_replaces", {
            "field": "tag", "old": tag_alice, "new": tag_bob,
        }))
    elif strategy.kind == "blind_guess":
        tag_bob = int(rng.integers(family.num_tags))
        events.append(("eve_replaces", {
            "field": "tag", "old": tag_alice, "new": tag_bob,
        }))
    # intercept_certain: certainty information only arrives with the tag,
    # after the commitment point, so the strategy never attempts here

    if not attempted and noise > 0 and rng.random() < noise:
        shift = 1 + int(rng.integers(family.num_tags - 1)) if family.num_tags > 1 else 0
        tag_bob = (tag_bob + shift) % family.num_tags
        events.append(("channel_noise", {"field": "tag", "value": tag_bob}))

    check_input = concat_for_tag(m_bob, salt_bob, salt_bits, family.num_messages)
    accept = family.eval_tag(true_key, check_input) == tag_bob
    events.append(("bob_verdict", {"accept": accept}))

    outcome = RoundOutcome(
        forgery_accepted=attempted and accept and m_bob != m_alice,
        honest_accepted=(not attempted) and accept,
        eve_attempted=attempted,
        eve_detected=attempted and not accept,
    )
    transcript = RoundTranscript(
        variant=variant.kind,
        strategy=strategy.to_json(),
        true_key=true_key,
        events=tuple(events),
        eve_keys_before=eve_keys.to_json() if collect_keysets else None,
        eve_keys_after=posterior.to_json() if collect_keysets else None,
    )
    return transcript, outcome


def _salted_delayed_tail(family, variant, strategy, rng, events, *,
                         true_key, eve_keys, m_alice, num_payloads,
                         num_salts, salt_bits, collect_keysets):
    """Delayed-commitment variant: the adversary runs both legs herself.

    She withholds the sender's message, feeds the sender a fabricated
    salt to elicit the tag early, and only then opens the leg toward the
    receiver.  Relative to the receiver, her message still precedes his
    salt, so the commitment structure (and the ``epsilon/r`` ceiling)
    is intact even though the sender's tag is already on the wire.
    """
    fake_salt = int(rng.integers(num_salts))
    events.append(("eve_replaces", {
        "field": "salt", "old": None, "new": fake_salt,
    }))
    tag_input_alice = concat_for_tag(
        m_alice, fake_salt, salt_bits, family.num_messages
    )
    tag_alice = family.eval_tag(true_key, tag_input_alice)
    events.append(("alice_sends", {"field": "tag", "value": tag_alice}))
    events.append(("eve_observes", {"field": "tag", "value": tag_alice}))

    posterior = intersect(
        eve_keys, constraint_set(family, tag_input_alice, tag_alice)
    )

    m_bob = _pick_delayed_message(
        posterior, m_alice, num_payloads, num_salts, salt_bits
    )
    events.append(("eve_replaces", {
        "field": "message", "old": m_alice, "new": m_bob,
    }))
    salt_bob = int(rng.integers(num_salts))
    events.append(("bob_sends", {"field": "salt", "value": salt_bob}))
    events.append(("eve_observes", {"field": "salt", "value": salt_bob}))

    target = concat_for_tag(m_bob, salt_bob, salt_bits, family.num_messages)
    forced = certain_forgery(posterior, target)
    tag_bob = forced if forced is not None else _majority_tag(posterior, target)
    events.append(("eve_replaces", {
        "field": "tag", "old": tag_alice, "new": tag_bob,
    }))

    accept = family.eval_tag(true_key, target) == tag_bob
    events.append(("bob_verdict", {"accept": accept}))

    outcome = RoundOutcome(
        forgery_accepted=accept and m_bob != m_alice,
        honest_accepted=False,
        eve_attempted=True,
        eve_detected=not accept,
    )
    transcript = RoundTranscript(
        variant=variant.kind,
        strategy=strategy.to_json(),
        true_key=true_key,
        events=tuple(events),
        eve_keys_before=eve_keys.to_json() if collect_keysets else None,
        eve_keys_after=posterior.to_json() if collect_keysets else None,
    )
    return transcript, outcome


def _craft_salted_payload(eve_keys: KeySet, num_payloads: int, num_salts: int,
                          salt_bits: int,
                          exclude: Optional[int] = None) -> tuple[int, int]:
    """Payload whose tag classes (summed over salts) favor the adversary.

    Returns ``(payload, good_mass)``; a zero mass means influence buys
    nothing and the caller may as well draw uniformly.
    """
    family = eve_keys.family
    sub = family.tag_table()[eve_keys.indices()]
    cap = _certainty_cap_floor(family)
    best, best_mass = None, -1
    for payload in range(num_payloads):
        if payload == exclude:
            continue
        mass = 0
        for salt in range(num_salts):
            packed = concat_for_tag(payload, salt, salt_bits, family.num_messages)
            counts = np.bincount(sub[:, packed], minlength=family.num_tags)
            mass += int(counts[(counts >= 1) & (counts <= cap)].sum())
        if mass > best_mass:
            best, best_mass = payload, mass
    if best is None:
        raise ConfigError("no payload available outside the excluded one")
    return best, best_mass


def _pick_delayed_message(posterior: KeySet, exclude: int, num_payloads: int,
                          num_salts: int, salt_bits: int) -> int:
    """After seeing the tag, pick the payload certain under most salts."""
    family = posterior.family
    best, best_score = None, -1
    for payload in range(num_payloads):
        if payload == exclude:
            continue
        score = 0
        for salt in range(num_salts):
            packed = concat_for_tag(payload, salt, salt_bits, family.num_messages)
            if certain_forgery(posterior, packed) is not None:
                score += 1
        if score > best_score:
            best, best_score = payload, score
    if best is None:
        raise ConfigError("no payload available outside the excluded one")
    return best


def _idealized_round(family: AnyFamily, variant, strategy, r, rng):
    """One round of the analytic partition model (plain or salted)."""
    num_keys = family.num_keys
    num_tags = family.num_tags
    epsilon = family.epsilon
    surviving = _surviving_count(num_keys, r)
    events: list[tuple[str, dict]] = [
        ("eve_influences", {"field": "message", "value": None,
                            "model": "idealized-partition"}),
        ("alice_sends", {"field": "message", "value": None}),
    ]

    if variant.kind == "plain":
        mass = _good_mass(num_keys, surviving, epsilon)
        whole, frac = divmod(mass, 1)
        position = int(rng.integers(surviving))
        success = position < whole or (
            position == whole
            and rng.random() * frac.denominator < frac.numerator
        )
        events.append(("alice_sends", {"field": "tag", "value": None}))
        attempted = bool(success)
        if attempted:
            events.append(("eve_replaces", {"field": "message",
                                            "old": None, "new": None}))
            events.append(("eve_replaces", {"field": "tag",
                                            "old": None, "new": None}))
        events.append(("bob_verdict", {"accept": bool(success), "modeled": True}))
        outcome = RoundOutcome(
            forgery_accepted=bool(success),
            honest_accepted=not attempted,
            eve_attempted=attempted,
            eve_detected=False,
        )
    else:
        # commitment first, tag later: the adversary replaces the message,
        # then best-guesses against the surviving class of the salted input
        events.append(("eve_replaces", {"field": "message",
                                        "old": None, "new": None}))
        events.append(("bob_sends", {"field": "salt", "value": None}))
        events.append(("alice_sends", {"field": "tag", "value": None}))
        class_size = num_keys // num_tags
        x = 1 + int(rng.hypergeometric(
            surviving - 1, num_keys - surviving, class_size - 1
        ))
        cap = epsilon * num_keys / num_tags
        success = rng.random() * (x * cap.denominator) < cap.numerator
        events.append(("eve_replaces", {"field": "tag",
                                        "old": None, "new": None}))
        events.append(("bob_verdict", {"accept": bool(success), "modeled": True}))
        outcome = RoundOutcome(
            forgery_accepted=bool(success),
            honest_accepted=False,
            eve_attempted=True,
            eve_detected=not success,
        )

    transcript = RoundTranscript(
        variant=variant.kind,
        strategy=strategy.to_json(),
        true_key=None,
        events=tuple(events),
    )
    return transcript, outcome


# -- campaigns -----------------------------------------------------------------


def _check_balanced(family: HashFamily) -> None:
    """Require condition 1 (the urn fast path depends on it)."""
    table = family.tag_table()
    cell = family.keys_per_tag
    for m in range(family.num_messages):
        counts = np.bincount(table[:, m], minlength=family.num_tags)
        if not np.all(counts[: family.num_tags] == cell):
            raise ConfigError(
                "family is not condition-1 balanced; kernel campaigns "
                "require it (run verify_asu2 first)"
            )


def _kernel_route(config: SimConfig) -> Optional[str]:
    """Which kernel (if any) can run this campaign exactly."""
    if config.noise != 0.0:
        return None
    s, v = config.strategy, config.variant
    if (
        v.kind == "plain"
        and s.kind == "intercept_certain"
        and s.capability == "oracle"
        and isinstance(config.family, HashFamily)
    ):
        return "weak_pair"
    if s.kind == "engineered" and s.partition == "idealized":
        return "partition" if v.kind == "plain" else "salted"
    return None


def monte_carlo(
    config: SimConfig,
    on_transcript: Optional[Callable[[int, RoundTranscript, RoundOutcome], None]] = None,
) -> SuccessStats:
    """Run a campaign of ``config.trials`` rounds and aggregate outcomes.

    Routing: eligible configurations (no noise, no transcript callback,
    a strategy with a batch sampler) run on the active kernel backend;
    everything else loops :func:`run_round` with one child seed per
    round.  Both paths derive all randomness from ``master_seed``, so
    repeated runs are identical.
    """
    family = config.family
    route = _kernel_route(config) if on_transcript is None else None
    if config.method == "kernel":
        if route is None:
            raise ConfigError(
                "this configuration has no kernel fast path; use method="
                "'round' (or 'auto')"
            )
        method = "kernel"
    elif config.method == "round":
        method = "round"
    else:
        method = "kernel" if route is not None else "round"

    if method == "round" and isinstance(family, FamilyShape):
        if not (
            config.strategy.kind == "engineered"
            and config.strategy.partition == "idealized"
        ):
            raise ConfigError(
                "a FamilyShape supports only idealized strategies"
            )

    prediction = _prediction(config)

    if method == "kernel":
        stats = _run_kernel_campaign(config, route)
    else:
        stats = _run_round_campaign(config, on_transcript)

    trials, attempts, forgeries, detections, honest = stats
    return SuccessStats(
        trials=trials,
        attempts=attempts,
        forgeries=forgeries,
        detections=detections,
        honest_accepted=honest,
        prediction=prediction,
        backend=kernels.backend_name() if method == "kernel" else "python",
        method=method,
    )


def _run_kernel_campaign(config: SimConfig, route: str):
    family = config.family
    trials = config.trials
    num_keys = family.num_keys
    num_tags = family.num_tags
    surviving = _surviving_count(num_keys, config.r)
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(config.master_seed)
    ))

    if route == "weak_pair":
        _check_balanced(family)
        threshold = _certainty_cap_floor(family)
        hits = kernels.weak_pair_trials(
            family.tag_table(), num_tags, surviving, threshold, trials, rng
        )
        return (trials, hits, hits, 0, trials - hits)

    if route == "partition":
        mass = _good_mass(num_keys, surviving, family.epsilon)
        whole = mass.numerator // mass.denominator
        frac = mass - whole
        successes = kernels.partition_trials(
            surviving, whole, frac.numerator, frac.denominator, trials, rng
        )
        return (trials, successes, successes, 0, trials - successes)

    if route == "salted":
        cap = family.epsilon * num_keys / num_tags
        successes = kernels.salted_certain_trials(
            num_keys, num_keys // num_tags, surviving,
            cap.numerator, cap.denominator, trials, rng,
        )
        return (trials, trials, successes, trials - successes, 0)

    raise ConfigError(f"unknown kernel route {route!r}")


def _run_round_campaign(config: SimConfig, on_transcript):
    seeds = np.random.SeedSequence(config.master_seed).spawn(config.trials)
    attempts = forgeries = detections = honest = 0
    collect = on_transcript is not None
    for i, seed in enumerate(seeds):
        rng = np.random.Generator(np.random.PCG64(seed))
        transcript, outcome = run_round(
            config.family, config.variant, config.strategy, config.r, rng,
            noise=config.noise,
            allow_message_influence=config.allow_message_influence,
            collect_keysets=collect,
        )
        attempts += outcome.eve_attempted
        forgeries += outcome.forgery_accepted
        detections += outcome.eve_detected
        honest += outcome.honest_accepted
        if on_transcript is not None:
            on_transcript(i, transcript, outcome)
    return (config.trials, attempts, forgeries, detections, honest)


def _prediction(config: SimConfig) -> Optional[Prediction]:
    family = config.family
    s = config.strategy
    v = config.variant
    num_keys, num_tags = family.num_keys, family.num_tags
    epsilon = family.epsilon
    surviving = _surviving_count(num_keys, config.r)
    r_exact = Fraction(surviving, num_keys)

    if s.kind == "passive":
        return Prediction("exact", -math.inf, "passive adversary never forges",
                          fraction=Fraction(0))

    if s.kind == "blind_guess":
        p = Fraction(1, num_tags)
        return Prediction("exact", -math.log2(num_tags),
                          "uniform tag guess lands with probability 1/T",
                          fraction=p)

    if s.kind == "intercept_certain":
        if v.kind == "salted":
            return Prediction(
                "exact", -math.inf,
                "certainty information arrives only after commitment",
                fraction=Fraction(0),
            )
        try:
            params = BoundParams.desk(num_keys, num_tags, epsilon, r_exact)
            exact = weak_pair_prob_exact(params)
        except DomainError:
            return None
        log2 = (
            -math.inf if exact == 0
            else math.log2(exact.numerator) - math.log2(exact.denominator)
        )
        if s.capability == "oracle":
            return Prediction(
                "exact", log2,
                "probability the observed pair leaves a certainty-grade class",
                fraction=exact,
            )
        return Prediction(
            "upper_bound", log2,
            "concrete certainty needs a witness message, so the class-size "
            "tail only bounds it",
            fraction=exact,
        )

    # engineered
    if v.kind == "salted":
        ceiling = min(Fraction(1), epsilon / r_exact)
        log2 = math.log2(ceiling.numerator) - math.log2(ceiling.denominator)
        return Prediction(
            "upper_bound", log2,
            "commitment before the tag caps any strategy at epsilon/r",
            fraction=ceiling,
        )
    mass = _good_mass(num_keys, surviving, epsilon)
    p = mass / surviving
    log2 = -math.inf if p == 0 else math.log2(p.numerator) - math.log2(p.denominator)
    if s.partition == "idealized":
        return Prediction(
            "exact", log2,
            "idealized partition: share of survivors in certainty classes",
            fraction=p,
        )
    return Prediction(
        "upper_bound", log2,
        "searched partitions cannot beat the idealized good-class mass",
        fraction=p,
    )
