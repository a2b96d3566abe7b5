"""Command-line harness: reproducible runs, (d, n) sweeps, multi-prime
consensus, machine-readable reports.

Exit codes: 0 ok, 2 property violated, 3 cross-prime disagreement,
4 generation or construction exhausted, 64 usage.  Reports are JSON Lines
by default (one object per trial, keys sorted) and are byte-identical for
identical (config, seed); per-trial wall time is only included under
--timings since it would break that guarantee.  IVHS_LOG in
{error, info, debug} controls diagnostics on stderr.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import click

from . import ivhs, nodalgen
from .errors import (ExchangeStalled, FieldMismatch, GenerationExhausted,
                     IvhsError, LedgerViolation)
from .field import is_prime, make_prime_field

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 2
EXIT_DISAGREE = 3
EXIT_EXHAUSTED = 4
EXIT_USAGE = 64


def _setup_logging():
    level = {"error": logging.ERROR, "info": logging.INFO,
             "debug": logging.DEBUG}.get(os.environ.get("IVHS_LOG", "error"),
                                         logging.ERROR)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def _derive_seed(*parts) -> int:
    """Stable sub-seed from a tag and run parameters."""
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def _sample_primes(count: int, seed: int, bits: int = 62) -> list:
    rng = random.Random(_derive_seed("prime-sampling", seed, bits))
    out: list = []
    while len(out) < count:
        cand = rng.randrange(1 << (bits - 1), 1 << bits) | 1
        if cand not in out and is_prime(cand):
            out.append(cand)
    return out


def _resolve_primes(spec: str, count: int, seed: int, degree: int) -> list:
    if spec == "auto":
        return _sample_primes(count, seed)
    try:
        p = int(spec)
    except ValueError:
        raise click.UsageError(f"--prime must be an integer or 'auto', got {spec!r}")
    if not is_prime(p):
        raise click.UsageError(f"--prime {p} is not prime")
    if p <= 2 * degree - 3:
        raise click.UsageError(f"--prime {p} too small for degree {degree}")
    return [p]


def _check_cell(degree: int, nodes: int):
    if degree < 4:
        raise click.UsageError("--degree must be at least 4")
    if not 0 <= nodes <= nodalgen.max_nodes(degree):
        raise click.UsageError(
            f"--nodes must lie in 0..{nodalgen.max_nodes(degree)} "
            f"for degree {degree}")


def _curve_sha(curve: nodalgen.NodalCurve) -> str:
    blob = json.dumps(curve.to_jsonable(), sort_keys=True,
                      separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _report_obj(curve, rep, prime: int, seed: int, trial: int,
                ms=None) -> dict:
    obj = {
        "d": rep.degree, "n": rep.node_count, "prime": prime, "seed": seed,
        "trial": trial, "sigma_kind": rep.multiplier_kind,
        "variation": rep.rank, "g": rep.genus, "maximal": rep.maximal,
        "certificates": curve.certificate.to_jsonable(),
        "retries": curve.retries, "curve_sha": _curve_sha(curve),
    }
    if ms is not None:
        obj["ms"] = ms
    return obj


def _flatten(obj, prefix=""):
    flat = {}
    for key in sorted(obj):
        val = obj[key]
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            flat.update(_flatten(val, prefix=name + "."))
        elif isinstance(val, (list, tuple)):
            flat[name] = json.dumps(val, sort_keys=True, separators=(",", ":"))
        else:
            flat[name] = val
    return flat


class Reporter:
    """Collects report objects, writes them once, in deterministic order."""

    def __init__(self, out_path, fmt: str):
        self.out_path = out_path
        self.fmt = fmt
        self.rows: list = []

    def add(self, obj: dict):
        self.rows.append(obj)

    def error(self, exc: Exception):
        self.add({"error": type(exc).__name__, "message": str(exc)})

    def render(self) -> str:
        if self.fmt == "csv":
            flats = [_flatten(r) for r in self.rows]
            fields: list = []
            for f in flats:
                for k in f:
                    if k not in fields:
                        fields.append(k)
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=sorted(fields), restval="")
            w.writeheader()
            w.writerows(flats)
            return buf.getvalue()
        lines = [json.dumps(r, sort_keys=True, separators=(",", ":"))
                 for r in self.rows]
        return "".join(line + "\n" for line in lines)

    def flush(self):
        text = self.render()
        if self.out_path:
            with open(self.out_path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
            sys.stdout.flush()


def _run_cell(degree: int, nodes: int, primes: list, trials: int, seed: int,
              max_retries: int, timings: bool):
    """All trials for one (d, n) cell: one curve per prime, `trials`
    multiplier draws each.  Returns (report rows, verdict matrix, retries)."""
    rows = []
    verdicts = []
    retries = 0
    for prime in primes:
        ctx = make_prime_field(prime)
        curve = nodalgen.generate(
            ctx, degree, nodes, _derive_seed("curve", degree, nodes, prime, seed),
            max_retries=max_retries)
        retries += curve.retries
        ivhs.ledger(curve)
        rng = random.Random(_derive_seed("sigma", degree, nodes, prime, seed))
        per_prime = []
        for trial in range(trials):
            t0 = time.perf_counter()
            mult = ivhs.random_multiplier(curve, rng)
            rep = ivhs.variation_rank(curve, mult, kind="random")
            ms = round((time.perf_counter() - t0) * 1000, 3) if timings else None
            rows.append(_report_obj(curve, rep, prime, seed, trial, ms))
            per_prime.append(rep.maximal)
        verdicts.append(per_prime)
    return rows, verdicts, retries


def _consensus_code(verdicts: list) -> int:
    """0 all maximal, 2 uniformly non-maximal somewhere, 3 split by prime."""
    code = EXIT_OK
    for col in zip(*verdicts):
        if len(set(col)) > 1:
            return EXIT_DISAGREE
        if not col[0]:
            code = EXIT_VIOLATED
    return code


def _merge_codes(codes) -> int:
    for c in (EXIT_DISAGREE, EXIT_VIOLATED, EXIT_EXHAUSTED):
        if c in codes:
            return c
    return EXIT_OK


@click.group()
def cli():
    """Exact verification of variation ranks for nodal plane curves."""


_common = [
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--prime", default="auto", show_default=True,
                 help="Field characteristic, or 'auto' for random 62-bit primes."),
    click.option("--primes", "prime_count", type=int, default=3,
                 show_default=True,
                 help="How many primes to sample for consensus when auto."),
    click.option("--max-retries", type=int, default=40, show_default=True),
    click.option("--out", type=click.Path(dir_okay=False), default=None,
                 help="Write the report here instead of stdout."),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                 default="json", show_default=True),
    click.option("--timings", is_flag=True,
                 help="Include per-trial wall time (breaks byte determinism)."),
]


def _with(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return deco


@cli.command("verify-nodal")
@click.option("--degree", type=int, required=True)
@click.option("--nodes", type=int, required=True)
@click.option("--trials", type=int, default=5, show_default=True)
@_with(_common)
def cmd_verify_nodal(degree, nodes, trials, seed, prime, prime_count,
                     max_retries, out, fmt, timings):
    """Random-multiplier maximality check for one (degree, nodes) cell."""
    _check_cell(degree, nodes)
    if trials < 1:
        raise click.UsageError("--trials must be at least 1")
    primes = _resolve_primes(prime, prime_count, seed, degree)
    reporter = Reporter(out, fmt)
    try:
        rows, verdicts, _ = _run_cell(degree, nodes, primes, trials, seed,
                                      max_retries, timings)
    except (GenerationExhausted, LedgerViolation) as exc:
        reporter.error(exc)
        reporter.flush()
        return EXIT_EXHAUSTED if isinstance(exc, GenerationExhausted) \
            else EXIT_VIOLATED
    for row in rows:
        reporter.add(row)
    reporter.flush()
    return _consensus_code(verdicts)


@cli.command("construct-sigma")
@click.option("--degree", type=int, required=True)
@click.option("--nodes", type=int, required=True)
@_with(_common)
def cmd_construct_sigma(degree, nodes, seed, prime, prime_count, max_retries,
                        out, fmt, timings):
    """Explicit multiplier via residuation; reports the decomposition."""
    _check_cell(degree, nodes)
    primes = _resolve_primes(prime, 1, seed, degree)
    p = primes[0]
    ctx = make_prime_field(p)
    reporter = Reporter(out, fmt)
    t0 = time.perf_counter()
    try:
        curve = nodalgen.generate(
            ctx, degree, nodes, _derive_seed("curve", degree, nodes, p, seed),
            max_retries=max_retries)
        ivhs.ledger(curve)
        dec = ivhs.cb_decompose(
            curve, _derive_seed("decompose", degree, nodes, p, seed),
            max_retries=max_retries)
        mult = ivhs.multiplier_from_decomposition(
            dec, _derive_seed("sigma", degree, nodes, p, seed))
        rep = ivhs.variation_rank(curve, mult, kind="constructed")
    except (GenerationExhausted, ExchangeStalled, FieldMismatch) as exc:
        # FieldMismatch: the cell's curves carry conjugate node orbits, so
        # the prime-field residuation construction does not apply to them
        reporter.error(exc)
        reporter.flush()
        return EXIT_EXHAUSTED
    except LedgerViolation as exc:
        reporter.error(exc)
        reporter.flush()
        return EXIT_VIOLATED
    ms = round((time.perf_counter() - t0) * 1000, 3) if timings else None
    reporter.add({
        "kind": "decomposition",
        "d": degree, "n": nodes, "prime": p, "seed": seed,
        "sigma_count": len(dec.residual_points),
        "pinned_count": len(dec.pinned_indices),
        "free_count": len(dec.free_points),
        "swaps": len(dec.swap_trace),
        "attempts": dec.attempts,
        "curve_sha": _curve_sha(curve),
        "decomposition": dec.to_jsonable(),
    })
    reporter.add(_report_obj(curve, rep, p, seed, 0, ms))
    reporter.flush()
    return EXIT_OK if rep.maximal and curve.certificate.ok() else EXIT_VIOLATED


@cli.command("sweep")
@click.option("--degree-min", type=int, required=True)
@click.option("--degree-max", type=int, required=True)
@click.option("--trials", type=int, default=5, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@_with(_common)
def cmd_sweep(degree_min, degree_max, trials, jobs, seed, prime, prime_count,
              max_retries, out, fmt, timings):
    """verify-nodal over every cell d in range, n in 0..C(d-1,2)-1."""
    if degree_min < 4 or degree_max < degree_min:
        raise click.UsageError("need 4 <= --degree-min <= --degree-max")
    if trials < 1:
        raise click.UsageError("--trials must be at least 1")
    if jobs < 1:
        raise click.UsageError("--jobs must be at least 1")
    primes = _resolve_primes(prime, prime_count, seed, degree_max)
    cells = [(d, n) for d in range(degree_min, degree_max + 1)
             for n in range(0, nodalgen.max_nodes(d) + 1)]
    args = [(d, n, primes, trials, seed, max_retries, timings)
            for d, n in cells]
    results: list = [None] * len(cells)
    if jobs == 1:
        for i, a in enumerate(args):
            results[i] = _sweep_cell_safe(a)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, res in enumerate(pool.map(_sweep_cell_safe, args)):
                results[i] = res
    reporter = Reporter(out, fmt)
    codes = []
    table = []
    for (d, n), (rows, verdicts, retries, err, ms) in zip(cells, results):
        if err is not None:
            reporter.error(err)
            codes.append(EXIT_EXHAUSTED
                         if isinstance(err, (GenerationExhausted,
                                             ExchangeStalled))
                         else EXIT_VIOLATED)
            table.append((d, n, 0, trials * len(primes), retries, ms))
            continue
        for row in rows:
            reporter.add(row)
        code = _consensus_code(verdicts)
        codes.append(code)
        flat = [v for per_prime in verdicts for v in per_prime]
        table.append((d, n, sum(flat), len(flat) - sum(flat), retries, ms))
    reporter.flush()
    _print_sweep_table(table, timings)
    return _merge_codes(codes)


def _sweep_cell_safe(cell_args):
    d, n, primes, trials, seed, max_retries, timings = cell_args
    t0 = time.perf_counter()
    try:
        rows, verdicts, retries = _run_cell(d, n, primes, trials, seed,
                                            max_retries, timings)
    except IvhsError as exc:
        ms = round((time.perf_counter() - t0) * 1000, 1)
        return [], [], 0, exc, ms if timings else None
    ms = round((time.perf_counter() - t0) * 1000, 1)
    return rows, verdicts, retries, None, ms if timings else None


def _print_sweep_table(table, timings: bool):
    header = f"{'d':>3} {'n':>3} {'pass':>5} {'fail':>5} {'retries':>8} {'ms':>9}"
    print(header, file=sys.stderr)
    for d, n, ok, bad, retries, ms in table:
        msc = f"{ms:9.1f}" if timings and ms is not None else f"{'-':>9}"
        print(f"{d:>3} {n:>3} {ok:>5} {bad:>5} {retries:>8} {msc}",
              file=sys.stderr)


@cli.command("identities")
@click.option("--degree-min", type=int, default=4, show_default=True)
@click.option("--degree-max", type=int, default=7, show_default=True)
@_with(_common)
def cmd_identities(degree_min, degree_max, seed, prime, prime_count,
                   max_retries, out, fmt, timings):
    """Dimension ledger, canonical-product surjectivity, minimal witness,
    and the counting identity, across a degree range."""
    if degree_min < 4 or degree_max < degree_min:
        raise click.UsageError("need 4 <= --degree-min <= --degree-max")
    primes = _resolve_primes(prime, 1, seed, degree_max)
    p = primes[0]
    ctx = make_prime_field(p)
    reporter = Reporter(out, fmt)
    try:
        for d in range(degree_min, degree_max + 1):
            lhs, rhs = ivhs.dimension_identity(d)
            if lhs != rhs:
                raise LedgerViolation(
                    f"counting identity fails at d={d}: {lhs} != {rhs}")
            reporter.add({"identity": "counting", "d": d,
                          "lhs": lhs, "rhs": rhs})
            for n in sorted({0, min(3, nodalgen.max_nodes(d))}):
                curve = nodalgen.generate(
                    ctx, d, n, _derive_seed("curve", d, n, p, seed),
                    max_retries=max_retries)
                led = ivhs.ledger(curve)
                reporter.add({"identity": "ledger", "prime": p,
                              **led.to_jsonable()})
            smooth = nodalgen.generate(
                ctx, d, 0, _derive_seed("curve", d, 0, p, seed),
                max_retries=max_retries)
            if not ivhs.noether_check(smooth.form):
                raise LedgerViolation(
                    f"canonical products fail to span at d={d}")
            reporter.add({"identity": "canonical-products", "d": d,
                          "prime": p, "surjective": True})
            probe = ivhs.fermat_min_witness(d, ctx)
            if probe.witness_rank != d - 3:
                raise LedgerViolation(
                    f"minimal witness rank {probe.witness_rank} != {d - 3} "
                    f"at d={d}")
            reporter.add({"identity": "minimal-witness", "d": d, "prime": p,
                          "witness": str(probe.witness),
                          "rank": probe.witness_rank})
    except (LedgerViolation, GenerationExhausted) as exc:
        reporter.error(exc)
        reporter.flush()
        return EXIT_EXHAUSTED if isinstance(exc, GenerationExhausted) \
            else EXIT_VIOLATED
    reporter.flush()
    return EXIT_OK


@cli.command("fermat-min")
@click.option("--degree", type=int, required=True)
@click.option("--trials", type=int, default=100, show_default=True,
              help="Random multipliers sampled alongside the monomial sweep.")
@_with(_common)
def cmd_fermat_min(degree, trials, seed, prime, prime_count, max_retries,
                   out, fmt, timings):
    """Minimal multiplication rank over the Fermat curve of a degree."""
    if degree < 4:
        raise click.UsageError("--degree must be at least 4")
    primes = _resolve_primes(prime, 1, seed, degree)
    p = primes[0]
    if p % degree == 0 or p <= 3 * degree:
        raise click.UsageError(
            f"--prime {p} unusable at degree {degree}")
    ctx = make_prime_field(p)
    reporter = Reporter(out, fmt)
    probe = ivhs.fermat_min_witness(degree, ctx, random_trials=trials,
                                    seed=_derive_seed("fermat", degree, p, seed))
    reporter.add({
        "d": degree, "prime": p, "expected": degree - 3,
        "witness": str(probe.witness), "witness_rank": probe.witness_rank,
        "monomials_tried": probe.monomials_tried,
        "random_trials": probe.random_trials,
        "random_min": probe.random_min,
        "random_evidence": "sampled lower-bound support, not a proof",
    })
    reporter.flush()
    ok = probe.witness_rank == degree - 3 and (
        probe.random_min is None or probe.random_min >= degree - 3)
    return EXIT_OK if ok else EXIT_VIOLATED


def main(argv=None) -> int:
    _setup_logging()
    try:
        rc = cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return 130
    return rc if isinstance(rc, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
