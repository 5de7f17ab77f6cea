"""Command-line interface.

Five subcommands: ``verify-family`` certifies a hash family,
``bounds`` evaluates the analytic attack probabilities, ``simulate``
runs Monte Carlo campaigns, ``demo`` walks through a single round, and
``reproduce-paper`` recomputes the headline figures of the published
analysis this package implements and checks them against the published
values.

Exit codes: 0 success; 1 a certificate or reproduction check failed;
2 usage, domain, or configuration error; 3 resource budget exceeded;
4 ``--assert`` comparison failed.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction

import click

from . import bounds as bounds_mod
from . import families as fam_mod
from . import protocol as proto_mod
from .errors import BudgetError, WcauthError

DEFAULT_SEED = 20260814
SEED_ENV_VAR = "WCAUTH_SEED"

EXIT_OK = 0
EXIT_CERT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_ASSERT = 4


def _fail(exc: WcauthError) -> "SystemExit":
    click.echo(f"error: {exc}", err=True)
    code = EXIT_BUDGET if isinstance(exc, BudgetError) else EXIT_USAGE
    return SystemExit(code)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as exc:
        raise click.UsageError(
            f"{SEED_ENV_VAR} must be an integer, got {raw!r}"
        ) from exc


def _emit_json(payload: dict, no_timestamp: bool) -> None:
    if not no_timestamp:
        payload = dict(payload)
        payload["generated_at"] = datetime.now(timezone.utc).isoformat()
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _kv_table(rows: list[tuple[str, object]]) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _load_family(affine, family_json, block):
    picked = [x for x in (affine, family_json, block) if x is not None]
    if len(picked) != 1:
        raise click.UsageError(
            "choose exactly one of --affine, --family-json, --block"
        )
    if affine is not None:
        return fam_mod.build_affine_family(affine)
    if block is not None:
        num_keys, num_tags, eps = _parse_triple(block)
        return fam_mod.build_block_family(num_keys, num_tags, eps)
    with open(family_json, "r", encoding="utf-8") as fh:
        return fam_mod.family_from_json(json.load(fh))


def _parse_triple(text: str) -> tuple[int, int, Fraction]:
    parts = text.split(",")
    if len(parts) != 3:
        raise click.UsageError(
            f"expected NUM_KEYS,NUM_TAGS,EPSILON, got {text!r}"
        )
    return int(parts[0]), int(parts[1]), fam_mod.as_fraction(parts[2])


@click.group()
@click.version_option(package_name="wcauth")
def main():
    """Universal-hash authentication under partial key knowledge."""


# -- verify-family --------------------------------------------------------------


@main.command("verify-family")
@click.option("--affine", type=int, default=None,
              help="Certify the affine family over this prime.")
@click.option("--family-json", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Certify a family loaded from a JSON spec.")
@click.option("--block", default=None, metavar="KEYS,TAGS,EPS",
              help="Certify a single-message block family.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]),
              default="table", show_default=True)
@click.option("--no-timestamp", is_flag=True,
              help="Omit the generation timestamp (reproducible output).")
def verify_family(affine, family_json, block, fmt, no_timestamp):
    """Certify that a family satisfies both ASU2 conditions.

    Exits 0 when the certificate holds and 1 when it does not (the
    violating cell is printed either way).
    """
    try:
        family = _load_family(affine, family_json, block)
        cert = fam_mod.verify_asu2(family)
    except WcauthError as exc:
        raise _fail(exc)

    cap = family.forgery_cell_cap()
    if fmt == "json":
        _emit_json({
            "family": fam_mod.family_to_json(family),
            "epsilon": str(family.epsilon),
            "condition2_cap": str(cap),
            "certificate": {
                "holds": cert.holds,
                "condition1_violation": cert.condition1_violation,
                "condition2_violation": cert.condition2_violation,
                "worst_condition2_count": cert.worst_condition2_count,
            },
        }, no_timestamp)
    else:
        rows = [
            ("family", repr(family)),
            ("claimed epsilon", str(family.epsilon)),
            ("condition-2 cap (eps*H/T)", str(cap)),
            ("worst condition-2 count", cert.worst_condition2_count),
            ("condition-1 violation", cert.condition1_violation or "none"),
            ("condition-2 violation", cert.condition2_violation or "none"),
            ("certified", "yes" if cert.holds else "NO"),
        ]
        click.echo(_kv_table(rows))
    if not cert.holds:
        raise SystemExit(EXIT_CERT_FAILED)


# -- bounds ---------------------------------------------------------------------


@main.command("bounds")
@click.option("--log2H", "log2_keys", type=float, required=True,
              help="log2 of the key-space size.")
@click.option("--log2T", "log2_tags", type=float, required=True,
              help="log2 of the tag-space size.")
@click.option("--epsilon", required=True,
              help="Substitution bound, e.g. 1/5 or 2/4294967296.")
@click.option("--r", "r_text", required=True,
              help="Surviving key fraction, e.g. 0.6 or 3/4.")
@click.option("--rounds-per-sec", type=float, default=None,
              help="Attack rate for expected break times.")
@click.option("--overhead-sec", type=float, default=0.0, show_default=True,
              help="Extra seconds per attempt.")
@click.option("--format", "fmt", type=click.Choice(["table", "json", "csv"]),
              default="table", show_default=True)
@click.option("--no-timestamp", is_flag=True,
              help="Omit the generation timestamp (reproducible output).")
def bounds_cmd(log2_keys, log2_tags, epsilon, r_text, rounds_per_sec,
               overhead_sec, fmt, no_timestamp):
    """Evaluate every analytic bound for one parameter set.

    When 2**log2H and 2**log2T are integers the exact desk-scale
    quantities (hypergeometric tail, exact-moment Chebyshev) are included
    as rationals; otherwise only the log-space values appear.
    """
    try:
        r = Fraction(r_text) if "/" in r_text else float(r_text)
        params = _params_from_logs(log2_keys, log2_tags, epsilon, r)
        report = bounds_mod.build_bound_report(
            params, rounds_per_second=rounds_per_sec,
            overhead_seconds=overhead_sec,
        )
    except WcauthError as exc:
        raise _fail(exc)

    flat = report.as_dict()
    if fmt == "json":
        _emit_json(flat, no_timestamp)
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=bounds_mod.REPORT_COLUMNS)
        writer.writeheader()
        writer.writerow({k: ("" if v is None else v) for k, v in flat.items()})
        click.echo(buf.getvalue().rstrip("\n"))
    else:
        rows = [(k, "-" if v is None else v) for k, v in flat.items()]
        click.echo(_kv_table(rows))


def _params_from_logs(log2_keys, log2_tags, epsilon, r) -> bounds_mod.BoundParams:
    """Desk-scale params when the sizes are integral, log-space otherwise."""
    if 0 <= log2_tags <= log2_keys < 53:
        keys = 2.0**log2_keys
        tags = 2.0**log2_tags
    else:
        keys = tags = float("inf")
    if (
        keys < 2**53
        and abs(keys - round(keys)) < 1e-6 * keys
        and abs(tags - round(tags)) < 1e-6 * tags
    ):
        try:
            return bounds_mod.BoundParams.desk(
                int(round(keys)), int(round(tags)), epsilon, r
            )
        except WcauthError:
            pass  # e.g. tags does not divide keys; fall through to logs
    return bounds_mod.BoundParams.deployment(log2_keys, log2_tags, epsilon, r)


# -- simulate -------------------------------------------------------------------


def _strategy_from_flags(strategy, capability, partition, delay_message):
    kind = strategy.replace("-", "_")
    return proto_mod.AdversaryStrategy(
        kind=kind,
        capability=capability,
        partition=partition,
        delay_message=delay_message,
    )


def _config_from_flags(affine, family_json, block, shape, variant, salt_bits,
                       payload_bits, strategy, capability, partition,
                       delay_message, r_text, trials, seed, noise,
                       allow_influence, method):
    if shape is not None:
        if any(x is not None for x in (affine, family_json, block)):
            raise click.UsageError("--shape excludes the other family options")
        num_keys, num_tags, eps = _parse_triple(shape)
        family = fam_mod.FamilyShape(num_keys, num_tags, eps)
    else:
        family = _load_family(affine, family_json, block)
    var = proto_mod.ProtocolVariant(
        kind=variant,
        salt_bits=salt_bits,
        payload_bits=payload_bits,
    )
    strat = _strategy_from_flags(strategy, capability, partition, delay_message)
    r = Fraction(r_text) if "/" in r_text else float(r_text)
    return proto_mod.SimConfig(
        family=family,
        variant=var,
        strategy=strat,
        r=r,
        trials=trials,
        master_seed=seed,
        noise=noise,
        allow_message_influence=allow_influence,
        method=method,
    )


_SIM_OPTIONS = [
    click.option("--config", "config_path",
                 type=click.Path(exists=True, dir_okay=False), default=None,
                 help="Load the whole campaign from a JSON config."),
    click.option("--affine", type=int, default=None,
                 help="Affine family over this prime."),
    click.option("--family-json", type=click.Path(exists=True, dir_okay=False),
                 default=None, help="Family from a JSON spec."),
    click.option("--block", default=None, metavar="KEYS,TAGS,EPS",
                 help="Single-message block family."),
    click.option("--shape", default=None, metavar="KEYS,TAGS,EPS",
                 help="Size-only family (idealized strategies only)."),
    click.option("--variant", type=click.Choice(["plain", "salted"]),
                 default="plain", show_default=True),
    click.option("--salt-bits", type=int, default=None),
    click.option("--payload-bits", type=int, default=None),
    click.option("--strategy",
                 type=click.Choice(["passive", "blind-guess",
                                    "intercept-certain", "engineered"]),
                 default="passive", show_default=True),
    click.option("--capability", type=click.Choice(["concrete", "oracle"]),
                 default="concrete", show_default=True),
    click.option("--partition", type=click.Choice(["searched", "idealized"]),
                 default="searched", show_default=True),
    click.option("--delay-message", is_flag=True,
                 help="Engineered+salted: elicit the tag before committing."),
    click.option("--r", "r_text", default="0.5", show_default=True,
                 help="Surviving key fraction, e.g. 0.6 or 3/4."),
    click.option("--noise", type=float, default=0.0, show_default=True,
                 help="Honest-round tag corruption probability."),
    click.option("--allow-influence", is_flag=True,
                 help="Permit adversary influence on the authenticated message."),
    click.option("--method", type=click.Choice(["auto", "kernel", "round"]),
                 default="auto", show_default=True),
    click.option("--seed", type=int, default=None,
                 help=f"Master seed (default ${SEED_ENV_VAR} or {DEFAULT_SEED})."),
]


def _add_options(options):
    def wrap(func):
        for opt in reversed(options):
            func = opt(func)
        return func
    return wrap


@main.command("simulate")
@_add_options(_SIM_OPTIONS)
@click.option("--trials", type=int, default=10000, show_default=True)
@click.option("--dump-transcripts", "dump_path",
              type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write one JSON transcript per round to this file.")
@click.option("--assert", "check", is_flag=True,
              help="Exit 4 unless the empirical rate agrees with the "
                   "analytic prediction.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]),
              default="table", show_default=True)
@click.option("--no-timestamp", is_flag=True,
              help="Omit the generation timestamp (reproducible output).")
def simulate(config_path, affine, family_json, block, shape, variant,
             salt_bits, payload_bits, strategy, capability, partition,
             delay_message, r_text, noise, allow_influence, method, seed,
             trials, dump_path, check, fmt, no_timestamp):
    """Run a Monte Carlo campaign and compare it with the analytic value."""
    try:
        if config_path is not None:
            with open(config_path, "r", encoding="utf-8") as fh:
                config = proto_mod.SimConfig.from_json(json.load(fh))
            if seed is not None:
                config = proto_mod.SimConfig(
                    **{**_config_kwargs(config), "master_seed": seed}
                )
        else:
            config = _config_from_flags(
                affine, family_json, block, shape, variant, salt_bits,
                payload_bits, strategy, capability, partition, delay_message,
                r_text, trials, seed if seed is not None else _default_seed(),
                noise, allow_influence, method,
            )
        stats = _run_campaign(config, dump_path)
    except WcauthError as exc:
        raise _fail(exc)

    payload = {"config": config.to_json(), "stats": stats.to_json()}
    if fmt == "json":
        _emit_json(payload, no_timestamp)
    else:
        click.echo(_stats_table(config, stats))
    if check and stats.agrees_with_prediction() is False:
        click.echo("assertion failed: empirical rate disagrees with the "
                   "analytic prediction", err=True)
        raise SystemExit(EXIT_ASSERT)


def _config_kwargs(config: proto_mod.SimConfig) -> dict:
    return {
        "family": config.family,
        "variant": config.variant,
        "strategy": config.strategy,
        "r": config.r,
        "trials": config.trials,
        "master_seed": config.master_seed,
        "noise": config.noise,
        "allow_message_influence": config.allow_message_influence,
        "method": config.method,
    }


def _run_campaign(config, dump_path):
    if dump_path is None:
        return proto_mod.monte_carlo(config)
    with open(dump_path, "w", encoding="utf-8") as fh:
        def writer(index, transcript, outcome):
            fh.write(json.dumps({
                "round": index,
                "transcript": transcript.to_json(),
                "outcome": outcome.to_json(),
            }, sort_keys=True))
            fh.write("\n")
        return proto_mod.monte_carlo(config, on_transcript=writer)


def _stats_table(config, stats) -> str:
    low, high = stats.wilson_interval
    rows = [
        ("variant", config.variant.kind),
        ("strategy", json.dumps(stats_strategy(config))),
        ("trials", stats.trials),
        ("attempts", stats.attempts),
        ("forgeries", stats.forgeries),
        ("detections", stats.detections),
        ("honest accepted", stats.honest_accepted),
        ("success rate", f"{stats.success_rate:.6g}"),
        ("wilson 95% interval", f"[{low:.6g}, {high:.6g}]"),
        ("backend/method", f"{stats.backend}/{stats.method}"),
    ]
    if stats.prediction is not None:
        pred = stats.prediction
        rows.append((f"prediction ({pred.kind})", f"{pred.value:.6g}"))
        rows.append(("prediction detail", pred.description))
        verdict = stats.agrees_with_prediction()
        rows.append(("agrees within 3 sigma", "yes" if verdict else "NO"))
    return _kv_table(rows)


def stats_strategy(config) -> dict:
    return config.strategy.to_json()


# -- demo -----------------------------------------------------------------------


@main.command("demo")
@_add_options(_SIM_OPTIONS)
@click.option("--format", "fmt", type=click.Choice(["table", "json"]),
              default="table", show_default=True)
@click.option("--no-timestamp", is_flag=True,
              help="Omit the generation timestamp (reproducible output).")
def demo(config_path, affine, family_json, block, shape, variant, salt_bits,
         payload_bits, strategy, capability, partition, delay_message,
         r_text, noise, allow_influence, method, seed, fmt, no_timestamp):
    """Walk through a single round, printing every wire event."""
    try:
        if config_path is not None:
            with open(config_path, "r", encoding="utf-8") as fh:
                config = proto_mod.SimConfig.from_json(json.load(fh))
        else:
            if all(x is None for x in (affine, family_json, block, shape)):
                affine = 7  # small enough to read, big enough to be interesting
            config = _config_from_flags(
                affine, family_json, block, shape, variant, salt_bits,
                payload_bits, strategy, capability, partition, delay_message,
                r_text, 1, seed if seed is not None else _default_seed(),
                noise, allow_influence, method,
            )
        rng = _demo_rng(config.master_seed if seed is None else seed)
        transcript, outcome = proto_mod.run_round(
            config.family, config.variant, config.strategy, config.r, rng,
            noise=config.noise,
            allow_message_influence=config.allow_message_influence,
        )
    except WcauthError as exc:
        raise _fail(exc)

    if fmt == "json":
        _emit_json({
            "transcript": transcript.to_json(),
            "outcome": outcome.to_json(),
        }, no_timestamp)
        return
    click.echo(f"variant: {transcript.variant}")
    click.echo(f"strategy: {json.dumps(transcript.strategy)}")
    click.echo(f"true key: {transcript.true_key}")
    if transcript.eve_keys_before is not None:
        click.echo(
            f"adversary key view: {len(transcript.eve_keys_before)} candidates "
            f"before, {len(transcript.eve_keys_after)} after"
        )
    for i, (kind, payload) in enumerate(transcript.events, start=1):
        detail = " ".join(f"{k}={v}" for k, v in payload.items())
        click.echo(f"  {i:2d}. {kind}: {detail}")
    click.echo("outcome: " + json.dumps(outcome.to_json()))


def _demo_rng(seed: int):
    import numpy as np
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


# -- reproduce-paper ------------------------------------------------------------


@main.command("reproduce-paper")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]),
              default="table", show_default=True)
@click.option("--no-timestamp", is_flag=True,
              help="Omit the generation timestamp (reproducible output).")
def reproduce_paper(fmt, no_timestamp):
    """Recompute the published headline figures and check each one.

    Exits 1 if any recomputed value drifts from its published figure.
    """
    checks = _reproduction_checks()
    ok = all(c["ok"] for c in checks)
    if fmt == "json":
        _emit_json({"checks": checks, "all_ok": ok}, no_timestamp)
    else:
        for c in checks:
            mark = "ok " if c["ok"] else "FAIL"
            click.echo(
                f"[{mark}] {c['name']}: computed {c['computed']} "
                f"(published {c['published']})"
            )
        click.echo("all checks passed" if ok else "some checks FAILED")
    if not ok:
        raise SystemExit(EXIT_CERT_FAILED)


def _reproduction_checks() -> list[dict]:
    """The five headline figures, recomputed from first principles."""
    checks = []

    def add(name, computed, published, ok, fmt_value=str):
        checks.append({
            "name": name,
            "computed": fmt_value(computed),
            "published": published,
            "ok": bool(ok),
        })

    # key budget: authenticate 100 kbit messages with 32-bit tags
    key_bits = fam_mod.wc_key_length(100000, 32)
    add("key bits per authenticated message", key_bits, "2176",
        key_bits == 2176)

    # blind forgery, eps = 2**-31, one attempt per 10 seconds
    eps31 = Fraction(1, 2**31)
    blind = bounds_mod.expected_break_time(eps31, rounds_per_second=0.1)
    add("blind-substitution expected break time", f"{blind.years:.1f} years",
        "about 680 years", abs(blind.years - 680.5) < 7)

    # partial knowledge r = 2**-0.125 over the full per-message key budget
    params = bounds_mod.BoundParams.deployment(
        log2_keys=float(key_bits), log2_tags=32.0,
        epsilon=Fraction(1, 2**31), r=2.0**-0.125,
    )
    weak = bounds_mod.chebyshev_bound(params, mode="asymptotic")
    add("single-round weak-pair probability", weak.decimal_str(),
        "3.5e-647", abs(weak.log10 - (math.log10(3.5) - 647)) < 0.02)

    weak_time = bounds_mod.expected_break_time(weak, rounds_per_second=1000.0)
    add("weak-pair expected break time",
        f"1e{weak_time.log10_years:.2f} years", "at least 1e635 years",
        weak_time.log10_years >= 635
        and abs(weak_time.log10_years - 635.96) < 0.02)

    eng = bounds_mod.engineered_attack_prob(params)
    add("engineered-partition success probability",
        eng.success.decimal_str(), "4.2e-11",
        abs(eng.success.log10 - (math.log10(4.2) - 11)) < 0.02)

    eng_time = bounds_mod.expected_break_time(
        eng.success, rounds_per_second=1000.0
    )
    add("engineered-partition expected break time",
        f"{eng_time.months:.1f} months", "about nine months",
        abs(eng_time.months - 9.0) < 0.25)

    return checks


if __name__ == "__main__":
    main()
