"""Command line front end.

One subcommand per library operation.  Three output formats:

* pretty (default): scalar results print as a bare number, structured
  reports as indented JSON, tables as aligned text.
* json: one compact JSON object; floats round-trip through repr.
* csv: a header line plus data rows, floats rendered with '%.17g' and
  a '.' decimal separator regardless of locale.

Exit codes: 0 on success, 2 when an input violates a precondition (the
message names it; argument parse errors land here as well), 3 when a
computation cannot certify its accuracy target.

A config file (--config PATH) holds flat key=value lines, keyed by the
long option names of the invoked subcommand; '#' starts a comment.
Explicit flags override config values.
"""

from __future__ import annotations

import csv as _csvmod
import io
import json
import math
import multiprocessing
import random
import sys
from fractions import Fraction

import click
import numpy as np
from click.core import ParameterSource

from . import __version__
from .errors import AccuracyError, EmptyRangeError, ValidationError
from .ntcore import IntegerSet, arith_fn, factorize, sieve_primes
from .galsum import (WeightDescriptor, gal_subsum, gal_sum,
                     gal_sum_weighted, quadratic_norm, sigma_p,
                     sigma_p_plus, sigma_p_star)
from .extremal import (ConstructionParams, best_rows_by_N, complete_set,
                       constant_B, construct_extremal_set, coprime_adjust,
                       default_grid, divisor_set_squarefree_bounds,
                       divisor_set_sum, divisor_set_upper_bound,
                       dyadic_split, fitted_exponent, gamma_bruteforce,
                       optimal_profile, set_predicates, sqrt_prime_sum,
                       _sweep_one)
from .characters import (DirichletGroup, build_character_table,
                         character_sum, orthogonality_check, sigma_q)
from .lfunc import l_half_sq, w_kernel, w_kernel_contour
from .resonance import resonate_L, resonate_charsum
from .zetalab import (KernelParams, _KERNEL_NAMES, build_real_resonator,
                      kernels as kernel_value, lemma53_check,
                      resonance_moment, subsum_bound_check, z_beta_max,
                      zeta_critical, zeta_grid)

_FORMATS = ("pretty", "json", "csv")


# ---------------------------------------------------------------------------
# parameter types

class RationalType(click.ParamType):
    """Accepts 'p/q', an integer, or a decimal literal."""

    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational; use p/q or a decimal",
                      param, ctx)


class IntListType(click.ParamType):
    """Comma separated integers, e.g. '1,2,3'."""

    name = "ints"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        toks = [t for t in str(value).replace(" ", "").split(",") if t]
        if not toks:
            self.fail("empty integer list", param, ctx)
        try:
            return tuple(int(t) for t in toks)
        except ValueError:
            self.fail(f"{value!r} is not a comma separated integer list",
                      param, ctx)


RATIONAL = RationalType()
INT_LIST = IntListType()


# ---------------------------------------------------------------------------
# config file and error mapping

def _read_config(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(
                    f"config line {lineno} is not key=value: {line!r}",
                    "config lines are key=value")
            key, _, val = line.partition("=")
            cfg[key.strip()] = val.strip()
    return cfg


class ConfigCommand(click.Command):
    """Command whose unset options may be filled from a key=value file."""

    def invoke(self, ctx):
        path = ctx.params.get("config_path")
        if path:
            cfg = _read_config(path)
            for p in self.params:
                if not isinstance(p, click.Option) or p.name == "config_path":
                    continue
                key = max(p.opts, key=len).lstrip("-")
                if key in cfg and ctx.get_parameter_source(
                        p.name) == ParameterSource.DEFAULT:
                    ctx.params[p.name] = p.type_cast_value(ctx, cfg[key])
        return super().invoke(ctx)


class CliGroup(click.Group):
    """Group that maps library exceptions onto the exit code contract."""

    command_class = ConfigCommand

    def main(self, *args, standalone_mode=True, **kwargs):
        try:
            return super().main(*args, standalone_mode=False, **kwargs)
        except click.exceptions.Exit as exc:
            sys.exit(exc.exit_code)
        except click.exceptions.Abort:
            sys.exit(1)
        except click.ClickException as exc:
            exc.show()
            sys.exit(exc.exit_code)
        except ValidationError as exc:
            detail = f" [violated: {exc.violated}]" if exc.violated else ""
            click.echo(f"error: {exc}{detail}", err=True)
            sys.exit(2)
        except AccuracyError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)


def _need(value, flag: str):
    if value is None:
        raise click.UsageError(f"missing option {flag}")
    return value


# ---------------------------------------------------------------------------
# output plumbing

def _g17(x: float) -> str:
    return "%.17g" % float(x)


def _jsonable(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, float, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), int):
        return obj.value
    return str(obj)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _g17(v)
    if isinstance(v, (int, Fraction)):
        return str(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    if hasattr(v, "item"):
        return _cell(v.item())
    return str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = _csvmod.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue().rstrip("\n")


def _pretty_cell(v) -> str:
    if isinstance(v, float):
        return "%.12g" % v
    return _cell(v)


def _pretty_table(header, rows) -> str:
    cells = [[str(h) for h in header]] + [[_pretty_cell(v) for v in row]
                                          for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths))
             for row in cells]
    return "\n".join(lines)


def _deliver(fmt, out, text: str) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


def _emit_result(fmt, out, mapping: dict, primary: str = "value") -> None:
    """Scalar result with metadata: pretty prints the primary value
    alone, json and csv carry the whole mapping."""
    fmt = fmt or "pretty"
    if fmt == "pretty":
        v = mapping[primary]
        text = repr(float(v)) if isinstance(v, float) else _cell(v)
    elif fmt == "json":
        text = json.dumps(_jsonable(mapping))
    else:
        text = _csv_text(list(mapping), [list(mapping.values())])
    _deliver(fmt, out, text)


def _emit_mapping(fmt, out, mapping: dict) -> None:
    fmt = fmt or "pretty"
    if fmt == "pretty":
        width = max(len(str(k)) for k in mapping)
        lines = []
        for k, v in mapping.items():
            sv = repr(float(v)) if isinstance(v, float) else _cell(v)
            lines.append(f"{str(k).ljust(width)} = {sv}")
        text = "\n".join(lines)
    elif fmt == "json":
        text = json.dumps(_jsonable(mapping))
    else:
        text = _csv_text(list(mapping), [list(mapping.values())])
    _deliver(fmt, out, text)


def _emit_series(fmt, out, name: str, values) -> None:
    values = list(values)
    fmt = fmt or "pretty"
    if fmt == "pretty":
        text = " ".join(_cell(v) for v in values)
    elif fmt == "json":
        text = json.dumps({name: _jsonable(values)})
    else:
        text = _csv_text([name], [[v] for v in values])
    _deliver(fmt, out, text)


def _emit_rows(fmt, out, header, rows, summary: dict | None = None) -> None:
    """Tabular result: csv drops the summary to stay machine readable."""
    fmt = fmt or "pretty"
    if fmt == "csv":
        text = _csv_text(header, rows)
    elif fmt == "json":
        payload = {"rows": [dict(zip(header, _jsonable(list(r))))
                            for r in rows]}
        if summary:
            payload.update(_jsonable(summary))
        text = json.dumps(payload)
    else:
        text = _pretty_table(header, rows)
        if summary:
            width = max(len(str(k)) for k in summary)
            extra = [f"{str(k).ljust(width)} = "
                     f"{repr(float(v)) if isinstance(v, float) else _cell(v)}"
                     for k, v in summary.items()]
            text = text + "\n" + "\n".join(extra)
    _deliver(fmt, out, text)


def _emit_report(fmt, out, mapping: dict, csv_rows=None) -> None:
    """Structured report: pretty is indented JSON; csv renders the row
    block when one is given, else the flat fields."""
    fmt = fmt or "pretty"
    if fmt == "pretty":
        text = json.dumps(_jsonable(mapping), indent=2)
    elif fmt == "json":
        text = json.dumps(_jsonable(mapping))
    else:
        if csv_rows is not None:
            header, rows = csv_rows
            text = _csv_text(header, rows)
        else:
            flat = {k: v for k, v in mapping.items()
                    if not isinstance(v, (list, tuple, dict))}
            text = _csv_text(list(flat), [list(flat.values())])
    _deliver(fmt, out, text)


# ---------------------------------------------------------------------------
# shared options and input builders

def common_options(f):
    decorators = [
        click.option("--format", "fmt", type=click.Choice(_FORMATS),
                     default=None, help="Output format (default pretty)."),
        click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="Write output to PATH instead of stdout."),
        click.option("--tol", type=float, default=None,
                     help="Accuracy target, where the operation takes one."),
        click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1),
                     default=None, help="Seed for randomized inputs."),
        click.option("--config", "config_path",
                     type=click.Path(exists=True, dir_okay=False),
                     default=None,
                     help="key=value file supplying unset options."),
    ]
    for dec in reversed(decorators):
        f = dec(f)
    return f


def _build_set(set_values, random_size, universe, seed):
    """Explicit --set wins; --random-set draws without replacement from
    1..universe with the stdlib generator, so a seed fixes the draw."""
    if set_values is not None and random_size is not None:
        raise click.UsageError("--set and --random-set are exclusive")
    if set_values is not None:
        return list(set_values)
    if random_size is None:
        raise click.UsageError("one of --set or --random-set is required")
    if random_size < 1:
        raise ValidationError("--random-set must be positive",
                              "random size >= 1")
    u = universe if universe is not None else max(4 * random_size, 64)
    if u < random_size:
        raise ValidationError(
            f"universe {u} cannot host {random_size} distinct values",
            "universe >= size")
    rng = random.Random(0 if seed is None else seed)
    return sorted(rng.sample(range(1, u + 1), random_size))


@click.group(cls=CliGroup, name="galres")
@click.version_option(__version__, prog_name="galres")
def main():
    """Gal sums, extremal sets, Dirichlet resonance and zeta moments."""


# ---------------------------------------------------------------------------
# arithmetic and Gal sums

@main.command()
@common_options
@click.option("--limit", type=int, default=None,
              help="Inclusive upper bound.")
def primes(fmt, out, tol, seed, config_path, limit):
    """Primes up to a limit."""
    limit = _need(limit, "--limit")
    _emit_series(fmt, out, "p", sieve_primes(limit))


@main.command()
@common_options
@click.option("--n", type=int, default=None, help="Integer to factor.")
def factor(fmt, out, tol, seed, config_path, n):
    """Prime factorization, one (p, e) row per prime."""
    n = _need(n, "--n")
    fac = factorize(n)
    if fmt == "pretty" or fmt is None:
        body = " * ".join(f"{p}^{e}" if e > 1 else str(p)
                          for p, e in fac.factors) or "1"
        _deliver(fmt, out, f"{fac.value} = {body}")
    else:
        _emit_rows(fmt, out, ["p", "e"], [list(t) for t in fac.factors])


@main.command()
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None,
              help="Comma separated elements.")
@click.option("--random-set", "random_size", type=int, default=None,
              help="Draw this many distinct elements at random.")
@click.option("--universe", type=int, default=None,
              help="Random elements are drawn from 1..UNIVERSE.")
@click.option("--alpha", type=RATIONAL, default=Fraction(1, 2),
              show_default=True, help="Exponent, e.g. 1/2.")
@click.option("--algorithm", type=click.Choice(["pairwise", "phi_identity"]),
              default="pairwise", show_default=True)
@click.option("--weight", type=click.Choice(["g0", "g1", "g_alpha"]),
              default=None, help="Switch to the weighted comparison sum.")
@click.option("--scale", type=float, default=1.0, show_default=True,
              help="Multiplicative factor C per prime in the weight.")
def galsum(fmt, out, tol, seed, config_path, set_values, random_size,
           universe, alpha, algorithm, weight, scale):
    """Gal sum over all ordered pairs of a set."""
    values = _build_set(set_values, random_size, universe, seed)
    if weight is not None:
        desc = WeightDescriptor(
            kind=weight, scale_C=scale,
            alpha_param=alpha if weight == "g_alpha" else None)
        value = gal_sum_weighted(values, desc)
        meta = {"value": value, "set_size": len(values), "weight": weight,
                "scale": scale, "alpha": alpha}
    else:
        value = gal_sum(values, alpha, algorithm=algorithm)
        meta = {"value": value, "set_size": len(values), "alpha": alpha,
                "algorithm": algorithm}
    _emit_result(fmt, out, meta)


@main.command()
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None)
@click.option("--alpha", type=RATIONAL, default=Fraction(1, 2),
              show_default=True)
def galsub(fmt, out, tol, seed, config_path, set_values, alpha):
    """Divisor-pair sub-sum of the Gal sum."""
    values = _need(set_values, "--set")
    value = gal_subsum(values, alpha)
    _emit_result(fmt, out, {"value": value, "set_size": len(values),
                            "alpha": alpha})


@main.command()
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None)
@click.option("--alpha", type=RATIONAL, default=Fraction(1, 2),
              show_default=True)
@click.option("--mode", type=click.Choice(["full", "divisibility"]),
              default="full", show_default=True)
def qnorm(fmt, out, tol, seed, config_path, set_values, alpha, mode):
    """Largest S(M')/|M'| over subsets, via the quadratic form."""
    values = _need(set_values, "--set")
    value = quadratic_norm(values, alpha, mode=mode)
    _emit_result(fmt, out, {"value": value, "set_size": len(values),
                            "alpha": alpha, "mode": mode})


@main.command(name="sigma-p")
@common_options
@click.option("--p", "p_", type=int, default=None, help="Prime.")
@click.option("--nu-m", type=INT_LIST, default=None,
              help="Valuation multiset of the first set.")
@click.option("--nu-n", type=INT_LIST, default=None,
              help="Valuation multiset of the second set.")
@click.option("--r", type=int, default=None, help="Top valuation, first.")
@click.option("--s", "s_", type=int, default=None,
              help="Top valuation, second.")
def sigma_p_cmd(fmt, out, tol, seed, config_path, p_, nu_m, nu_n, r, s_):
    """Local sums at one prime: explicit multisets or the closed forms
    for full valuation ranges 0..r and 0..s."""
    p_ = _need(p_, "--p")
    if nu_m is not None or nu_n is not None:
        nu_m = _need(nu_m, "--nu-m")
        nu_n = _need(nu_n, "--nu-n")
        value = sigma_p(list(nu_m), list(nu_n), p_)
        _emit_result(fmt, out, {"value": value, "p": p_,
                                "nu_m": list(nu_m), "nu_n": list(nu_n)})
        return
    r = _need(r, "--r")
    s_ = _need(s_, "--s")
    _emit_mapping(fmt, out, {
        "p": p_, "r": r, "s": s_,
        "sigma_star": sigma_p_star(r, s_, p_),
        "sigma_plus": sigma_p_plus(r, s_, p_),
    })


# ---------------------------------------------------------------------------
# extremal sets

@main.command()
@common_options
@click.option("--n", "n_target", type=int, default=None,
              help="Cardinality budget N.")
@click.option("--u", type=float, default=2.0, show_default=True)
@click.option("--a", "a_", type=float, default=1.4, show_default=True)
@click.option("--gamma", type=float, default=0.9, show_default=True)
@click.option("--alpha-res", type=float, default=1.0, show_default=True)
@click.option("--materialize-limit", type=int, default=20000,
              show_default=True)
@click.option("--verify-product", is_flag=True, default=False,
              help="Cross-check block sums against direct summation.")
@click.option("--squarefree", is_flag=True, default=False,
              help="Experimental squarefree block variant.")
def construct(fmt, out, tol, seed, config_path, n_target, u, a_, gamma,
              alpha_res, materialize_limit, verify_product, squarefree):
    """Block product construction with exact counting and diagnostics."""
    n_target = _need(n_target, "--n")
    rep = construct_extremal_set(ConstructionParams(
        N=n_target, u=u, a=a_, gamma=gamma, alpha_res=alpha_res,
        materialize_limit=materialize_limit, verify_product=verify_product,
        squarefree=squarefree))
    block_header = ["k", "lo", "hi", "prime_count", "budget", "cardinality",
                    "log_gal_sum", "j_k", "T_k", "V_k"]
    block_rows = [[b.k, b.interval[0], b.interval[1], b.prime_count,
                   b.budget, b.cardinality, b.log_gal_sum, b.j_k, b.T_k,
                   b.V_k] for b in rep.blocks]
    mapping = {
        "N": n_target, "u": u, "a": a_, "gamma": gamma,
        "alpha_res": alpha_res, "squarefree": squarefree, "K": rep.K,
        "cardinality": rep.cardinality,
        "log_cardinality": rep.log_cardinality,
        "gal_sum": rep.gal_sum_value, "log_gal_sum": rep.log_gal_sum,
        "normalized_exponent": rep.normalized_exponent,
        "h": rep.h, "beta": rep.beta, "alpha_optimal": rep.alpha_optimal,
        "beta_optimal": rep.beta_optimal,
        "budget_reductions": rep.budget_reductions,
        "verified_blocks": list(rep.verified_blocks),
        "verified_full": rep.verified_full,
        "blocks": [dict(zip(block_header, row)) for row in block_rows],
    }
    if rep.final_set is not None and len(rep.final_set) <= 500:
        mapping["final_set"] = [m.value for m in rep.final_set.elements]
    _emit_report(fmt, out, mapping, csv_rows=(block_header, block_rows))


@main.command(name="complete-set")
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None)
@click.option("--n", "n_target", type=int, default=None,
              help="Target cardinality.")
def complete_set_cmd(fmt, out, tol, seed, config_path, set_values, n_target):
    """Grow a set to exactly N elements without halving its ratio."""
    values = _need(set_values, "--set")
    n_target = _need(n_target, "--n")
    grown = complete_set(IntegerSet.from_values(values), n_target)
    _emit_series(fmt, out, "m", [m.value for m in grown.elements])


@main.command(name="divisor-sum")
@common_options
@click.option("--d", "d_", type=int, default=None, help="Modulus D.")
@click.option("--alpha", type=RATIONAL, default=Fraction(1, 2),
              show_default=True)
def divisor_sum(fmt, out, tol, seed, config_path, d_, alpha):
    """Gal sum of the full divisor set of D, with its bounds."""
    d_ = _need(d_, "--d")
    fac = factorize(d_)
    value = divisor_set_sum(fac, alpha)
    tau = arith_fn(fac, "tau")
    mapping = {"D": d_, "tau": tau, "value": value,
               "per_divisor": value / tau,
               "upper_bound": divisor_set_upper_bound(fac, alpha)}
    if all(e == 1 for _, e in fac.factors):
        lo, hi = divisor_set_squarefree_bounds(fac, alpha)
        mapping["squarefree_lower"] = lo
        mapping["squarefree_upper"] = hi
    _emit_mapping(fmt, out, mapping)


@main.command()
@common_options
@click.option("--n", "n_target", type=int, default=None,
              help="Cardinality budget N.")
@click.option("--terms", type=int, default=10 ** 5, show_default=True,
              help="Series length for the constants.")
def profile(fmt, out, tol, seed, config_path, n_target, terms):
    """Exponent staircase of the optimizing divisor set."""
    n_target = _need(n_target, "--n")
    prof = optimal_profile(n_target, series_terms=terms)
    mapping = {
        "N": prof.N, "y": prof.y, "y_unconstrained": prof.y_unconstrained,
        "lam": prof.lam, "K": prof.K, "C1": prof.C1, "C2": prof.C2,
        "c2_fixed_point": prof.c2_fixed_point,
        "predicted_log_gamma": prof.predicted_log_gamma,
        "tau_D": prof.tau_D,
        "r_sequence": list(prof.r_sequence),
        "mu": {str(p): k for p, k in sorted(prof.mu_map.items())},
    }
    rows = [[p, k] for p, k in sorted(prof.mu_map.items())]
    _emit_report(fmt, out, mapping, csv_rows=(["p", "mu"], rows))


@main.command(name="constant-b")
@common_options
@click.option("--terms", type=int, default=10000, show_default=True)
def constant_b(fmt, out, tol, seed, config_path, terms):
    """Partial value of the series constant B with its enclosure."""
    est = constant_B(terms)
    _emit_result(fmt, out, {"value": est.value, "lower": est.lower,
                            "upper": est.upper, "terms": est.terms,
                            "partial_sum": est.partial_sum})


@main.command(name="sqrt-prime-sum")
@common_options
@click.option("--y", "y_", type=float, default=None, help="Cut point.")
def sqrt_prime_sum_cmd(fmt, out, tol, seed, config_path, y_):
    """Sum of p^(-1/2) over p <= y against its smooth main term."""
    y_ = _need(y_, "--y")
    _emit_mapping(fmt, out, sqrt_prime_sum(y_))


@main.command()
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None)
def predicates(fmt, out, tol, seed, config_path, set_values):
    """Structural predicates of a set."""
    values = _need(set_values, "--set")
    _emit_mapping(fmt, out, set_predicates(IntegerSet.from_values(values)))


@main.command(name="coprime-adjust")
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None)
@click.option("--q", "q_", type=int, default=None,
              help="Modulus to become coprime to.")
def coprime_adjust_cmd(fmt, out, tol, seed, config_path, set_values, q_):
    """Swap primes shared with q for smaller fresh ones."""
    values = _need(set_values, "--set")
    q_ = _need(q_, "--q")
    adjusted = coprime_adjust(IntegerSet.from_values(values), q_)
    _emit_series(fmt, out, "m", [m.value for m in adjusted.elements])


@main.command(name="dyadic-split")
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None)
def dyadic_split_cmd(fmt, out, tol, seed, config_path, set_values):
    """Partition into dyadic blocks and flag the one with the largest
    Gal sum."""
    values = _need(set_values, "--set")
    blocks, best = dyadic_split(IntegerSet.from_values(values))
    rows = []
    best_index = None
    for i, blk in enumerate(blocks):
        members = [m.value for m in blk.elements]
        j = (members[0] - 1).bit_length() - 1
        is_best = blk is best
        if is_best:
            best_index = i
        rows.append([i, 2 ** j if j >= 0 else 0, 2 ** (j + 1), len(blk),
                     gal_sum(blk), members, is_best])
    header = ["block", "lower", "upper", "size", "gal_sum", "members",
              "best"]
    _emit_rows(fmt, out, header, rows, summary={"best_index": best_index})


@main.command(name="gamma-brute")
@common_options
@click.option("--n", "n_size", type=int, default=None,
              help="Subset size, 1..6.")
@click.option("--universe", type=int, default=40, show_default=True)
@click.option("--alpha", type=RATIONAL, default=Fraction(1, 2),
              show_default=True)
def gamma_brute(fmt, out, tol, seed, config_path, n_size, universe, alpha):
    """Exact supremum of S(M)/|M| over tiny subsets of 1..universe."""
    n_size = _need(n_size, "--n")
    value, witness = gamma_bruteforce(n_size, alpha, universe_max=universe)
    _emit_result(fmt, out, {"value": value, "n": n_size,
                            "universe": universe, "alpha": alpha,
                            "witness": [m.value for m in witness.elements]})


# ---------------------------------------------------------------------------
# characters and central values

@main.command(name="char-table")
@common_options
@click.option("--q", "q_", type=int, default=None, help="Modulus.")
def char_table(fmt, out, tol, seed, config_path, q_):
    """Character table summary: one row per character."""
    q_ = _need(q_, "--q")
    header = ["index", "parity", "primitive"]
    if q_ >= 3 and all(q_ % p for p in sieve_primes(max(4, int(q_ ** 0.5) + 1))
                       if p < q_):
        table = build_character_table(q_)
        rows = [[c.index, c.parity, c.is_primitive]
                for c in table.characters()]
        summary = {"q": q_, "generator": table.generator,
                   "count": len(rows)}
    else:
        group = DirichletGroup(q_)
        if group.phi > 4096:
            raise ValidationError(
                f"phi({q_}) = {group.phi} rows is too large to list",
                "phi(q) <= 4096 for char-table")
        rows = [[c.index, c.parity, c.is_primitive]
                for c in group.characters()]
        summary = {"q": q_, "generators": list(group.generators),
                   "count": len(rows)}
    _emit_rows(fmt, out, header, rows, summary=summary)


@main.command(name="char-sum")
@common_options
@click.option("--q", "q_", type=int, default=None, help="Modulus.")
@click.option("--index", "j", type=int, default=None,
              help="Character index.")
@click.option("--x", "x_", type=int, default=None, help="Sum cut.")
def char_sum(fmt, out, tol, seed, config_path, q_, j, x_):
    """Character sum over n <= x."""
    q_ = _need(q_, "--q")
    j = _need(j, "--index")
    x_ = _need(x_, "--x")
    chi = _character(q_, j)
    s = character_sum(x_, chi)
    _emit_mapping(fmt, out, {"q": q_, "index": chi.index,
                             "parity": chi.parity, "x": x_,
                             "re": s.real, "im": s.imag, "abs": abs(s)})


def _character(q_: int, j: int):
    try:
        return build_character_table(q_).character(j)
    except ValidationError:
        group = DirichletGroup(q_)
        jj = j % group.phi
        for c in group.characters():
            if c.index == jj:
                return c
        raise


@main.command(name="w-kernel")
@common_options
@click.option("--x", "x_", type=float, default=None, help="Argument.")
@click.option("--nu", type=click.IntRange(0, 1), default=0, show_default=True,
              help="Parity of the character the kernel weights.")
@click.option("--contour", is_flag=True, default=False,
              help="Also evaluate the independent contour form.")
def w_kernel_cmd(fmt, out, tol, seed, config_path, x_, nu, contour):
    """Smoothing kernel of the central value formula."""
    x_ = _need(x_, "--x")
    value = w_kernel(x_, nu=nu, tol=tol if tol is not None else 1e-10)
    mapping = {"value": value, "x": x_, "nu": nu}
    if contour:
        alt = w_kernel_contour(x_, nu=nu)
        mapping["contour"] = alt
        mapping["abs_diff"] = abs(value - alt)
    _emit_result(fmt, out, mapping)


@main.command(name="l-half")
@common_options
@click.option("--q", "q_", type=int, default=None, help="Prime modulus.")
@click.option("--index", "j", type=int, default=None,
              help="Character index.")
def l_half(fmt, out, tol, seed, config_path, q_, j):
    """|L(1/2, chi)|^2 via the smoothed series."""
    q_ = _need(q_, "--q")
    j = _need(j, "--index")
    chi = build_character_table(q_).character(j)
    res = l_half_sq(chi, tol=tol if tol is not None else 1e-8)
    _emit_result(fmt, out, {
        "value": res.value, "q": res.q,
        "character_index": res.character_index, "parity": res.parity,
        "n_cut": res.n_cut, "tail_bound": res.tail_bound,
        "coefficient_drift": res.coefficient_drift})


@main.command()
@common_options
@click.option("--q", "q_", type=int, default=None, help="Prime modulus.")
@click.option("--m", "m_", type=int, default=None)
@click.option("--n", "n_", type=int, default=None)
@click.option("--nu", type=click.IntRange(0, 1), default=0, show_default=True)
def orthogonality(fmt, out, tol, seed, config_path, q_, m_, n_, nu):
    """Fixed-parity primitive character orthogonality at (m, n)."""
    q_ = _need(q_, "--q")
    m_ = _need(m_, "--m")
    n_ = _need(n_, "--n")
    lhs, rhs = orthogonality_check(q_, m_, n_, nu)
    _emit_mapping(fmt, out, {"q": q_, "m": m_, "n": n_, "nu": nu,
                             "lhs": lhs, "rhs": rhs,
                             "abs_diff": abs(lhs - rhs),
                             "sigma_q": sigma_q(q_, m_, n_)})


def _resonance_payload(report):
    rows = [{"char_index": r.char_index, "parity": r.parity,
             "re_R": r.r_value.real, "im_R": r.r_value.imag,
             "weight_sq": r.weight_sq} for r in report.rows]
    return {
        "kind": report.kind, "q": report.q, "x": report.x,
        "set_size": report.set_size, "family_size": report.family_size,
        "numerator": report.numerator, "denominator": report.denominator,
        "implied_bound": report.implied_bound,
        "true_extremum": report.true_extremum,
        "witness_character_index": report.witness_character_index,
        "rows": rows,
    }


@main.command(name="resonate-l")
@common_options
@click.option("--q", "q_", type=int, default=None,
              help="Prime modulus, q >= 5.")
@click.option("--set", "set_values", type=INT_LIST, default=None,
              help="Resonator multiset, coprime to q.")
@click.option("--auto-set", is_flag=True, default=False,
              help="Use 1..min(q-1, 20).")
def resonate_l_cmd(fmt, out, tol, seed, config_path, q_, set_values,
                   auto_set):
    """Resonance lower bound for the largest |L(1/2, chi)|^2 in the
    even primitive family."""
    q_ = _need(q_, "--q")
    if auto_set:
        source = list(range(1, min(q_ - 1, 20) + 1))
    else:
        source = list(_need(set_values, "--set"))
    report = resonate_L(q_, source, tol=tol if tol is not None else 1e-8)
    payload = _resonance_payload(report)
    header = ["char_index", "parity", "re_R", "im_R", "L_half_sq"]
    rows = [[r["char_index"], r["parity"], r["re_R"], r["im_R"],
             r["weight_sq"]] for r in payload["rows"]]
    _emit_report(fmt, out, payload, csv_rows=(header, rows))


@main.command(name="resonate-charsum")
@common_options
@click.option("--q", "q_", type=int, default=None, help="Modulus, q >= 3.")
@click.option("--x", "x_", type=int, default=None, help="Sum cut.")
@click.option("--set", "set_values", type=INT_LIST, default=None)
@click.option("--auto-set", is_flag=True, default=False,
              help="Use the units 1..min(q-1, 20) coprime to q.")
def resonate_charsum_cmd(fmt, out, tol, seed, config_path, q_, x_,
                         set_values, auto_set):
    """Resonance lower bound for the largest |sum chi(n), n <= x| over
    non-principal characters."""
    q_ = _need(q_, "--q")
    x_ = _need(x_, "--x")
    if auto_set:
        source = [h for h in range(1, min(q_ - 1, 20) + 1)
                  if math.gcd(h, q_) == 1]
    else:
        source = list(_need(set_values, "--set"))
    report = resonate_charsum(q_, x_, source)
    payload = _resonance_payload(report)
    header = ["char_index", "parity", "re_R", "im_R", "S_x_abs"]
    rows = [[r["char_index"], r["parity"], r["re_R"], r["im_R"],
             math.sqrt(r["weight_sq"])] for r in payload["rows"]]
    _emit_report(fmt, out, payload, csv_rows=(header, rows))


# ---------------------------------------------------------------------------
# zeta tools

@main.command()
@common_options
@click.option("--t", "t_", type=float, default=None, help="Height.")
@click.option("--sigma", type=float, default=0.5, show_default=True)
def zeta(fmt, out, tol, seed, config_path, t_, sigma):
    """zeta(sigma + it) by Euler-Maclaurin with a certified remainder."""
    t_ = _need(t_, "--t")
    tol_ = tol if tol is not None else 1e-10
    if sigma == 0.5:
        z = zeta_critical(t_, tol=tol_)
    else:
        z = complex(zeta_grid([t_], tol=tol_, sigma=sigma)[0])
    _emit_mapping(fmt, out, {"sigma": sigma, "t": t_, "re": z.real,
                             "im": z.imag, "abs": abs(z)})


@main.command()
@common_options
@click.option("--t-max", "t_max", type=float, default=None,
              help="Top of the scan window (the T of the kernel pair).")
@click.option("--beta", type=float, default=0.0, show_default=True,
              help="Scan starts at T^beta.")
@click.option("--eps", type=float, default=0.5, show_default=True)
@click.option("--step", type=float, default=0.05, show_default=True)
def zscan(fmt, out, tol, seed, config_path, t_max, beta, eps, step):
    """Scan |zeta(1/2 + it)| over [T^beta, T] and refine the maximum."""
    t_max = _need(t_max, "--t-max")
    params = KernelParams(T=t_max, eps=eps, beta=beta)
    value, argmax = z_beta_max(params, grid_step=step)
    if (fmt or "pretty") == "csv":
        lo = t_max ** beta
        count = int(math.floor((t_max - lo) / step))
        taus = np.concatenate([lo + step * np.arange(count + 1), [t_max]])
        zs = zeta_grid(taus)
        rows = [[float(t), z.real, z.imag, abs(z)]
                for t, z in zip(taus, zs)]
        _emit_rows(fmt, out, ["t", "re", "im", "abs"], rows)
    else:
        _emit_mapping(fmt, out, {"T": t_max, "beta": beta,
                                 "value": value, "argmax": argmax})


@main.command(name="kernels")
@common_options
@click.option("--which", type=click.Choice(_KERNEL_NAMES), default=None)
@click.option("--x", "x_", type=float, default=None, help="Argument.")
@click.option("--t", "t_", "--T", type=float, default=None,
              help="Length parameter T > 1.")
@click.option("--eps", type=float, default=0.5, show_default=True)
@click.option("--beta", type=float, default=0.0, show_default=True)
def kernels_cmd(fmt, out, tol, seed, config_path, which, x_, t_, eps, beta):
    """Evaluate one of the Fourier kernel pair members."""
    which = _need(which, "--which")
    x_ = _need(x_, "--x")
    t_ = _need(t_, "--t")
    params = KernelParams(T=t_, eps=eps, beta=beta)
    value = kernel_value(params, x_, which)
    _emit_result(fmt, out, {"value": value, "which": which, "x": x_,
                            "T": t_, "eps": eps,
                            "aperture": params.aperture})


@main.command()
@common_options
@click.option("--sigma", type=float, default=0.5, show_default=True)
@click.option("--t", "t_", type=float, default=None,
              help="Imaginary part of s.")
@click.option("--fn", type=click.Choice(["gaussian", "K"]),
              default="gaussian", show_default=True)
@click.option("--T", "t_len", type=float, default=None,
              help="Kernel length for fn=K.")
@click.option("--eps", type=float, default=0.5, show_default=True)
@click.option("--u-max", type=float, default=None,
              help="Integration window override.")
def lemma53(fmt, out, tol, seed, config_path, sigma, t_, fn, t_len, eps,
            u_max):
    """Second-moment convolution identity check at s = sigma + it."""
    t_ = _need(t_, "--t")
    params = None
    if fn == "K":
        t_len = _need(t_len, "--T")
        params = KernelParams(T=t_len, eps=eps)
    lhs, rhs, diff = lemma53_check(
        complex(sigma, t_), fn=fn, tol=tol if tol is not None else 1e-6,
        params=params, u_max=u_max)
    _emit_mapping(fmt, out, {"sigma": sigma, "t": t_, "fn": fn,
                             "lhs": lhs, "rhs": rhs, "abs_diff": diff})


@main.command()
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None)
@click.option("--t", "t_", "--T", type=float, default=None,
              help="Block ratio parameter T.")
def resonator(fmt, out, tol, seed, config_path, set_values, t_):
    """Multiplicative block resonator of a set."""
    values = _need(set_values, "--set")
    t_ = _need(t_, "--t")
    res = build_real_resonator(list(values), t_)
    rows = [[h, float(w), len(blk)]
            for h, w, blk in zip(res.reps, res.weights, res.blocks)]
    _emit_rows(fmt, out, ["rep", "r", "block_size"], rows,
               summary={"T": t_, "set_size": res.size,
                        "blocks": len(res.reps), "r_zero": res.r_zero()})


@main.command()
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None)
@click.option("--t", "t_", "--T", type=float, default=None,
              help="Moment length T > 1.")
@click.option("--eps", type=float, default=0.5, show_default=True)
def moment(fmt, out, tol, seed, config_path, set_values, t_, eps):
    """Smoothed resonance moment M1 with its explicit bound and the
    Gal-sum comparison."""
    values = _need(set_values, "--set")
    t_ = _need(t_, "--t")
    params = KernelParams(T=t_, eps=eps)
    rep = resonance_moment(list(values), params,
                           tol=tol if tol is not None else 1e-8)
    _emit_report(fmt, out, {
        "T": rep.T, "eps": rep.eps, "set_size": rep.set_size,
        "m1": rep.m1, "m1_bound": rep.m1_bound,
        "i1_estimate": rep.i1_estimate, "gal_direct": rep.gal_direct,
        "pair_count": rep.pair_count,
        "i1_to_gal_ratio": (rep.i1_estimate / rep.gal_direct
                            if rep.gal_direct else math.inf)})


@main.command(name="subsum-bound")
@common_options
@click.option("--set", "set_values", type=INT_LIST, default=None,
              help="Divisor-closed set.")
def subsum_bound(fmt, out, tol, seed, config_path, set_values):
    """Divisor sub-sum against its multiplicative product bound."""
    values = _need(set_values, "--set")
    lhs, rhs, ok = subsum_bound_check(list(values))
    _emit_mapping(fmt, out, {"subsum": lhs, "bound": rhs,
                             "per_element_ok": ok, "holds": lhs <= rhs})


# ---------------------------------------------------------------------------
# the sweep

def _sweep_task(task):
    """Worker wrapper: never raises, reports the failure as text so the
    caller can keep one output row per input tuple."""
    try:
        return _sweep_one(task), ""
    except Exception as exc:
        return None, f"{type(exc).__name__}: {exc}"


@main.command()
@common_options
@click.option("--n", "n_values", type=INT_LIST, default=None,
              help="Explicit N values.")
@click.option("--exp-min", type=int, default=10, show_default=True,
              help="Smallest power of two.")
@click.option("--exp-max", type=int, default=16, show_default=True,
              help="Largest power of two.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--full", is_flag=True, default=False,
              help="All grid rows, not just the best per N.")
@click.option("--squarefree", is_flag=True, default=False,
              help="Experimental squarefree block variant.")
def sweep(fmt, out, tol, seed, config_path, n_values, exp_min, exp_max,
          workers, full, squarefree):
    """Parameter sweep of the construction over the default grid.

    Rows are produced in deterministic input order; a failing tuple
    fills the error column and leaves the value columns empty."""
    if n_values is not None:
        ns = list(n_values)
    else:
        if exp_max < exp_min:
            raise EmptyRangeError(
                f"power range {exp_min}..{exp_max} is empty",
                "exp_min <= exp_max")
        ns = [2 ** k for k in range(exp_min, exp_max + 1)]
    if not ns:
        raise EmptyRangeError("no N values to sweep", "N range non-empty")
    grid = default_grid()
    tasks = [(N, u, g, a, ar, squarefree)
             for N in ns for (u, g, a, ar) in grid]
    if workers > 1:
        with multiprocessing.Pool(workers) as pool:
            results = pool.map(_sweep_task, tasks)
    else:
        results = [_sweep_task(t) for t in tasks]

    header = ["N", "u", "a", "gamma", "alpha_res", "cardinality",
              "gal_sum", "normalized_exponent", "error"]
    good = [row for row, _ in results if row is not None]
    if not good:
        first_err = next(err for _, err in results if err)
        raise AccuracyError(f"every sweep row failed; first error: "
                            f"{first_err}")

    if full:
        rows = []
        for task, (row, err) in zip(tasks, results):
            if row is None:
                rows.append([task[0], task[1], task[3], task[2], task[4],
                             None, None, None, err])
            else:
                rows.append([row.N, row.u, row.a, row.gamma, row.alpha_res,
                             row.cardinality, row.gal_sum_value,
                             row.normalized_exponent, ""])
    else:
        rows = [[r.N, r.u, r.a, r.gamma, r.alpha_res, r.cardinality,
                 r.gal_sum_value, r.normalized_exponent, ""]
                for r in best_rows_by_N(good)]
    summary = {"fitted_exponent": fitted_exponent(good),
               "failed": sum(1 for row, _ in results if row is None),
               "squarefree": squarefree}
    _emit_rows(fmt, out, header, rows, summary=summary)


if __name__ == "__main__":
    main()
