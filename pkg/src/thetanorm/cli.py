"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 budget exhausted,
4 verification failure.  One JSON document is written to stdout (or a TSV
table for surveys); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BudgetError, DomainError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------

@dataclass
class RunConfig:
    cutoff: int = 10**5
    grid: tuple[int, int] = (24, 24)
    budget: int = 10**7
    cache_dir: str = field(default_factory=lambda: str(Path.home() / ".cache" / "thetanorm"))
    use_cache: bool = True
    threads: int = 1
    format: str = "json"
    epsilon: float = 0.0
    constant: float = 1.0

    def validate(self) -> None:
        if self.cutoff < 2 or self.budget < 1 or self.threads < 1:
            raise UsageError("cutoff, budget and threads must be positive")
        if min(self.grid) < 2:
            raise UsageError("grid must be at least 2x2")
        if self.format not in ("json", "tsv"):
            raise UsageError("format must be json or tsv")
        if self.epsilon < 0 or self.constant <= 0:
            raise UsageError("need epsilon >= 0 and constant > 0")


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"grid must look like 24x24, got {text!r}") from None


def _coerce(name: str, raw: str):
    if name == "grid":
        return _parse_grid(raw)
    if name == "use_cache":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    if kind == "int":
        return int(float(raw))
    if kind == "float":
        return float(raw)
    return raw.strip()


def load_config(path: str | None, args: argparse.Namespace | None = None) -> RunConfig:
    """Defaults, then the key = value file, then environment, then flags."""
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    if path:
        parser = configparser.ConfigParser()
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        parser.read_string("[run]\n" + text)
        for key, raw in parser["run"].items():
            key = key.replace("-", "_")
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            setattr(cfg, key, _coerce(key, raw))
    if "THETANORM_CACHE_DIR" in os.environ:
        cfg.cache_dir = os.environ["THETANORM_CACHE_DIR"]
    if "THETANORM_THREADS" in os.environ:
        cfg.threads = int(os.environ["THETANORM_THREADS"])
    if args is not None:
        for key in ("cutoff", "budget", "threads", "epsilon", "constant", "cache_dir"):
            val = getattr(args, key, None)
            if val is not None:
                setattr(cfg, key, val)
        if getattr(args, "grid", None):
            cfg.grid = _parse_grid(args.grid)
        if getattr(args, "no_cache", False):
            cfg.use_cache = False
        if getattr(args, "format", None):
            cfg.format = args.format
    cfg.validate()
    return cfg


# ----------------------------------------------------------------------
# output and cache
# ----------------------------------------------------------------------

def normalise(obj):
    """JSON-ready copy with floats at 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): normalise(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalise(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return {"re": normalise(obj.real), "im": normalise(obj.imag)}
    if isinstance(obj, np.ndarray):
        return normalise(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(normalise(obj), sort_keys=True)


class Cache:
    """Content-addressed JSON blobs; corrupt or unreadable entries are ignored."""

    def __init__(self, root: str, enabled: bool = True):
        self.root = Path(root)
        self.enabled = enabled

    @staticmethod
    def key(op: str, form, params: dict) -> str:
        blob = json.dumps({"op": op, "form": form, "params": normalise(params),
                           "version": __version__}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str):
        if not self.enabled:
            return None
        try:
            return json.loads(self._path(key).read_text())["value"]
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def put(self, key: str, value) -> None:
        if not self.enabled:
            return
        path = self._path(key)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                fh.write(json.dumps({"value": normalise(value)}, sort_keys=True))
            os.replace(tmp, path)
        except OSError as exc:
            print(f"warning: cache write failed: {exc}", file=sys.stderr)

    def fetch(self, op: str, form, params: dict, compute):
        key = self.key(op, form, params)
        hit = self.get(key)
        if hit is not None:
            return hit
        value = normalise(compute())
        self.put(key, value)
        return value


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _common() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's defaults from overwriting options given
    # before the subcommand name
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", help="key = value configuration file")
    g.add_argument("--cache-dir", dest="cache_dir")
    g.add_argument("--no-cache", action="store_true", default=argparse.SUPPRESS)
    g.add_argument("--threads", type=_positive)
    g.add_argument("--format", choices=("json", "tsv"))
    g.add_argument("--plot", metavar="PATH", help="also render a figure to PATH")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="thetanorm", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        return sp

    sp = add("form", "invariants, reduction and Jordan data of a form")
    sp.add_argument("--form", required=True)
    sp.add_argument("--action", default="info", choices=("info", "reduce", "jordan", "finv", "aniso"))
    sp.add_argument("--p", type=_positive)
    sp.add_argument("--s", default=None, help="argument of F(Q, s), e.g. 3/2")

    sp = add("density", "local representation density")
    sp.add_argument("--form", required=True)
    sp.add_argument("--p", type=_positive)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--method", default="auto", choices=("auto", "bruteforce", "yang_odd", "siegel_unramified"))
    sp.add_argument("--product", action="store_true", help="Euler product over all p up to the cutoff")
    sp.add_argument("--cutoff", type=_positive)

    sp = add("genus", "genus coefficient r(gen Q, n)")
    sp.add_argument("--form", required=True)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--cutoff", type=_positive)
    sp.add_argument("--upto", type=_positive, default=100, help="range for --plot")

    sp = add("theta", "theta coefficients r(Q, n) for n <= X")
    sp.add_argument("--form", required=True)
    sp.add_argument("--upto", type=_positive, required=True)
    sp.add_argument("--out")
    sp.add_argument("--budget", type=_positive)

    sp = add("transform", "transformation data and Fourier magnitudes at a cusp")
    sp.add_argument("--form", required=True)
    sp.add_argument("--rho", type=_int_list, required=True, help="a,b,c,d")
    sp.add_argument("--nmax", type=int, default=0)
    sp.add_argument("--method", default="quadrature", choices=("quadrature", "series"))

    sp = add("norm", "numerical Petersson norm")
    sp.add_argument("--form", required=True)
    sp.add_argument("--other")
    sp.add_argument("--mode", default="f", choices=("f", "g"))
    sp.add_argument("--grid")
    sp.add_argument("--coset-depth", default="full", choices=("full",))
    sp.add_argument("--floor", type=float, default=1e-3)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--cutoff", type=_positive)

    sp = add("bounds", "evaluate a bound")
    sp.add_argument("--form")
    sp.add_argument("--kind", required=True,
                    choices=("thm1", "thm2_diagonal", "thm3_lower", "eq13_petersson",
                             "eq21_dukeiwaniec", "lemma41_error", "lemma42_threshold", "aniso"))
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--constant", type=float)
    sp.add_argument("--n", type=_positive)
    sp.add_argument("--norm", type=float, help="<f, f> for the coefficient bounds")
    sp.add_argument("--m", type=int)
    sp.add_argument("--level", type=_positive)
    sp.add_argument("--v", type=_positive)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--gcd", type=_positive, default=1)

    sp = add("sieve", "sieve weights, identity, majorant and searches")
    ss = sp.add_subparsers(dest="action", parser_class=_Parser)
    x = ss.add_parser("omega", parents=[common])
    x.add_argument("--n", type=_positive, required=True)
    x.add_argument("--l", type=_int_list, required=True)
    x = ss.add_parser("Omega", parents=[common])
    x.add_argument("--n", type=_positive, required=True)
    x.add_argument("--d", type=_positive, required=True)
    x = ss.add_parser("identity", parents=[common])
    x.add_argument("--n", type=_positive, required=True)
    x.add_argument("--dmax", type=_positive, default=15)
    x = ss.add_parser("optimize", parents=[common])
    x.add_argument("--tau", default="3/58")
    x.add_argument("--beta3", type=float, default=6.6408)
    x = ss.add_parser("survey", parents=[common])
    x.add_argument("--from", dest="lo", type=_positive, default=3)
    x.add_argument("--to", dest="hi", type=_positive, required=True)
    x.add_argument("--budget", type=_positive)
    x = ss.add_parser("smooth", parents=[common])
    x.add_argument("--n", type=_positive, required=True)
    x.add_argument("--eta", type=float, required=True)
    x.add_argument("--widen", type=float, default=8.0)
    x.add_argument("--variant", default="plain", choices=("plain", "split_e"))
    x = ss.add_parser("mainterm", parents=[common])
    x.add_argument("--n", type=_positive, required=True)
    x.add_argument("--cutoff", type=_positive)

    sp = add("verify", "run acceptance suites")
    sp.add_argument("suite", choices=("local", "counting", "transform", "sieve", "all"))
    return parser


# ----------------------------------------------------------------------
# handlers
# ----------------------------------------------------------------------

def _load(path: str):
    from .forms import load_form

    try:
        return load_form(path)
    except OSError as exc:
        raise UsageError(f"cannot read form {path}: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise UsageError(f"bad form file {path}: {exc}") from None


def _gram(form) -> list:
    return [list(r) for r in form.gram]


def _require_prime(p: int | None) -> int:
    from sympy import isprime

    if p is None:
        raise UsageError("--p is required")
    if not isprime(p):
        raise UsageError(f"{p} is not prime")
    return p


def cmd_form(args, cfg, cache):
    from .bounds import anisotropic_primes
    from .forms import minimum, siegel_reduce
    from .padic import f_invariant, jordan_decompose, local_primes

    form = _load(args.form)
    if args.action == "info":
        return {"gram": _gram(form), "m": form.m, "det": form.det, "level": form.level,
                "primitive": form.primitive, "local_primes": local_primes(form),
                "minimum": minimum(form)}
    if args.action == "reduce":
        red = siegel_reduce(form)
        return {"gram": [list(r) for r in red.gram], "U": [list(r) for r in red.U],
                "a": [str(x) for x in red.a]}
    if args.action == "jordan":
        ps = [_require_prime(args.p)] if args.p else local_primes(form)
        return {"decompositions": [jordan_decompose(form, p).to_json() for p in ps]}
    if args.action == "finv":
        ss = [Fraction(args.s)] if args.s else [Fraction(s) for s in range(1, form.m + 1)]
        out = []
        for s in ss:
            fi = f_invariant(form, s)
            out.append({"s": str(s), "value": fi.value, "exact": fi.exact_integer,
                        "factors": {str(p): str(e) for p, e in fi.factors.items()}})
        return {"F": out}
    return {"anisotropic_primes": sorted(anisotropic_primes(form))}


def cmd_density(args, cfg, cache):
    from .padic import density, density_product, local_primes

    form = _load(args.form)
    if args.product:
        cutoff = args.cutoff or cfg.cutoff
        res = cache.fetch("density_product", _gram(form), {"n": args.n, "cutoff": cutoff},
                          lambda: density_product(form, args.n, cutoff).to_json())
        if getattr(args, "plot", None):
            from .plotting import plot_densities
            ram = res["ramified"]
            plot_densities(list(ram), [float(Fraction(v)) for v in ram.values()], args.plot,
                           f"n = {args.n}")
        return res
    p = _require_prime(args.p)
    res = cache.fetch("density", _gram(form), {"p": p, "n": args.n, "method": args.method},
                      lambda: density(form, p, args.n, args.method).to_json())
    if getattr(args, "plot", None):
        from .plotting import plot_densities
        ps = local_primes(form)
        plot_densities(ps, [density(form, q, args.n).value for q in ps], args.plot, f"n = {args.n}")
    return res


def cmd_genus(args, cfg, cache):
    from .eisenstein import genus_coefficient, genus_series

    form = _load(args.form)
    cutoff = args.cutoff or cfg.cutoff
    res = cache.fetch("genus", _gram(form), {"n": args.n, "cutoff": cutoff},
                      lambda: genus_coefficient(form, args.n, cutoff).to_json())
    if getattr(args, "plot", None):
        from .lattice import theta_coefficients
        from .plotting import plot_genus_comparison
        X = args.upto
        r = [1] + theta_coefficients(form, X, cfg.budget).r
        plot_genus_comparison(r, genus_series(form, X, min(cutoff, 10**4)), args.plot,
                              title=f"det {form.det}, level {form.level}")
    return res


def cmd_theta(args, cfg, cache):
    from .lattice import theta_coefficients

    form = _load(args.form)
    budget = args.budget or cfg.budget
    res = cache.fetch("theta", _gram(form), {"X": args.upto},
                      lambda: theta_coefficients(form, args.upto, budget).to_json())
    if args.out:
        Path(args.out).write_text(dumps(res) + "\n")
    return res


def cmd_transform(args, cfg, cache):
    from .modular import fourier_magnitudes, transform_data

    form = _load(args.form)
    if len(args.rho) != 4:
        raise UsageError("--rho needs four integers a,b,c,d")
    a, b, c, d = args.rho
    if a * d - b * c != 1:
        raise UsageError("rho must have determinant 1")
    rho = ((a, b), (c, d))
    out = transform_data(form, rho).to_json()
    if args.nmax > 0:
        mags = fourier_magnitudes(form, rho, args.nmax, args.method)
        out["magnitudes"] = mags
        if getattr(args, "plot", None):
            from .plotting import plot_magnitudes
            plot_magnitudes(mags, None, args.plot)
    return out


def cmd_norm(args, cfg, cache):
    from .bounds import BoundConfig, thm1_bound, thm2_bound, thm3_lower
    from .modular import petersson_norm_estimate

    form = _load(args.form)
    other = _load(args.other) if args.other else None
    grid = _parse_grid(args.grid) if args.grid else cfg.grid
    cutoff = min(args.cutoff or cfg.cutoff, 10**4)
    params = {"mode": args.mode, "grid": grid, "floor": args.floor, "tol": args.tol,
              "cutoff": cutoff, "other": _gram(other) if other else None}
    res = cache.fetch("norm", _gram(form), params,
                      lambda: petersson_norm_estimate(form, other, args.mode, grid, args.floor,
                                                      args.tol, cutoff).to_json())
    bc = BoundConfig(cfg.epsilon, cfg.constant)
    upper = (thm2_bound(form, bc) if form.is_diagonal() else thm1_bound(form, bc)).value
    lower = thm3_lower(form, bc).value
    res = dict(res, upper_bound=upper, lower_bound=lower)
    if getattr(args, "plot", None):
        from .plotting import plot_norm_bracket
        plot_norm_bracket(res["value"], lower, upper, args.plot)
    return res


def cmd_bounds(args, cfg, cache):
    from . import bounds as B

    eps = cfg.epsilon if args.epsilon is None else args.epsilon
    const = cfg.constant if args.constant is None else args.constant
    bc = B.BoundConfig(eps, const)
    kind = args.kind
    if kind in ("eq13_petersson", "eq21_dukeiwaniec"):
        if args.norm is None or args.n is None:
            raise UsageError(f"{kind} needs --norm and --n")
        if args.form:
            form = _load(args.form)
            m, N = form.m, form.level
        else:
            if args.m is None or args.level is None:
                raise UsageError(f"{kind} needs --form or both --m and --level")
            m, N = args.m, args.level
        if kind == "eq13_petersson":
            rep = B.eq13_bound(args.norm, m, args.n, N, bc)
        else:
            rep = B.eq21_bound(args.norm, args.n, N, args.v, bc)
    else:
        if not args.form:
            raise UsageError(f"{kind} needs --form")
        form = _load(args.form)
        if kind == "thm1":
            rep = B.thm1_bound(form, bc)
        elif kind == "thm2_diagonal":
            rep = B.thm2_bound(form, bc)
        elif kind == "thm3_lower":
            rep = B.thm3_lower(form, bc)
        elif kind == "lemma41_error":
            if args.n is None:
                raise UsageError("lemma41_error needs --n")
            rep = B.error_bound_m3(form, args.n, bc)
        elif kind == "lemma42_threshold":
            rep = B.threshold_m45(form, args.beta, args.gcd, bc, args.n)
        else:
            return {"kind": "aniso", "anisotropic_primes": sorted(B.anisotropic_primes(form))}
    out = rep.to_json()
    if getattr(args, "plot", None):
        from .plotting import plot_bound_terms
        plot_bound_terms(out, args.plot)
    return out


def _survey_chunk(bounds: tuple[int, int, int]) -> dict:
    from .sieve import min_omega_survey

    lo, hi, budget = bounds
    return min_omega_survey(lo, hi, budget)


def cmd_sieve(args, cfg, cache):
    from . import sieve as S

    act = args.action
    if act is None:
        raise UsageError("sieve needs an action: omega, Omega, identity, optimize, survey, smooth, mainterm")
    if act == "omega":
        if len(args.l) != 3:
            raise UsageError("--l needs three integers")
        return {"l": args.l, "n": args.n, "omega": S.omega_weight(tuple(args.l), args.n)}
    if act == "Omega":
        return {"d": args.d, "n": args.n, "Omega": S.Omega_of_d(args.d, args.n),
                "Omega_multiplicative": S.Omega_multiplicative(args.d, args.n)}
    if act == "identity":
        checks = []
        for d in range(1, args.dmax + 1):
            if S.is_squarefree(d):
                lhs, rhs, ok = S.sieve_identity_check(args.n, d, cfg.budget)
                checks.append({"d": d, "lhs": lhs, "rhs": rhs, "pass": ok})
        return {"n": args.n, "checks": checks, "all_pass": all(c["pass"] for c in checks)}
    if act == "optimize":
        try:
            tau = Fraction(args.tau)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"bad --tau {args.tau!r}") from None
        opt = S.optimize_m(S.SieveConfig(tau, args.beta3))
        if getattr(args, "plot", None):
            from .plotting import plot_majorant
            plot_majorant(float(tau), args.beta3, opt.zeta_star, opt.m_star, args.plot)
        return opt.to_json()
    if act == "mainterm":
        return {"n": args.n, "X": S.main_term_X(args.n, args.cutoff or cfg.cutoff)}
    if act == "smooth":
        res = S.smooth_search(args.n, args.eta, args.widen, args.variant)
        return dict(res.to_json(), verified=S.verify_smooth(res))
    # survey: cached per n
    budget = args.budget or cfg.budget
    survey: dict[int, dict] = {}
    todo = []
    for n in range(args.lo, args.hi + 1):
        if not S.admissible(n):
            continue
        hit = cache.get(cache.key("survey", None, {"n": n}))
        if hit is not None:
            survey[n] = hit
        else:
            todo.append(n)
    if todo:
        chunks = _chunks(todo, cfg.threads)
        if cfg.threads > 1 and len(chunks) > 1:
            with ProcessPoolExecutor(cfg.threads) as pool:
                parts = list(pool.map(_survey_chunk, [(c[0], c[-1], budget) for c in chunks]))
        else:
            parts = [_survey_chunk((c[0], c[-1], budget)) for c in chunks]
        for part in parts:
            for n, v in part.items():
                survey[n] = v
                cache.put(cache.key("survey", None, {"n": n}), v)
    survey = dict(sorted(survey.items()))
    if getattr(args, "plot", None):
        from .plotting import plot_survey
        plot_survey(survey, args.plot)
    if cfg.format == "tsv":
        rows = ["n\tmin_Omega\tx1\tx2\tx3"]
        for n, v in survey.items():
            if "min_Omega" in v:
                rows.append("\t".join(map(str, [n, v["min_Omega"], *v["x"]])))
            else:
                rows.append(f"{n}\t{v.get('skipped')}\t\t\t")
        return "\n".join(rows)
    vals = [v["min_Omega"] for v in survey.values() if "min_Omega" in v]
    return {"from": args.lo, "to": args.hi, "count": len(survey),
            "max_min_Omega": max(vals) if vals else None, "survey": survey}


def _chunks(items: list[int], k: int) -> list[list[int]]:
    k = max(1, min(k, len(items)))
    size = math.ceil(len(items) / k)
    return [items[i:i + size] for i in range(0, len(items), size)]


def cmd_verify(args, cfg, cache):
    from .acceptance import run_suite

    results = run_suite(args.suite)
    for r in results:
        print(r.line(), file=sys.stderr)
    # timings go to stderr only, so repeated runs print identical JSON
    rows = [{k: v for k, v in r.to_json().items() if k != "seconds"} for r in results]
    out = {"suite": args.suite, "results": rows,
           "all_pass": all(r.passed for r in results)}
    if getattr(args, "plot", None):
        from .plotting import plot_acceptance
        plot_acceptance([r.to_json() for r in results], args.plot)
    return out


HANDLERS = {"form": cmd_form, "density": cmd_density, "genus": cmd_genus, "theta": cmd_theta,
            "transform": cmd_transform, "norm": cmd_norm, "bounds": cmd_bounds,
            "sieve": cmd_sieve, "verify": cmd_verify}


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_help())
        cfg = load_config(getattr(args, "config", None), args)
        cache = Cache(cfg.cache_dir, cfg.use_cache)
        result = HANDLERS[args.command](args, cfg, cache)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DomainError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(result, str):
        stdout.write(result + "\n")
    else:
        stdout.write(dumps(result) + "\n")
    if args.command == "verify" and not result["all_pass"]:
        return EXIT_VERIFY
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
