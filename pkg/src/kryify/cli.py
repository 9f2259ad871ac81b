"""Command-line entry point.

Every subcommand builds a RunConfig, run() dispatches it and returns the exit
status with the rendered output.  JSON output is sorted and carries no timing
or parallelism information, so it is byte-identical across runs and worker
counts.
"""

import json
import os
import random
import re
import sys
from dataclasses import dataclass, field
from importlib import resources

import click
import jsonschema
import sympy

from .gradedlinalg import Window

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

COMMANDS = ("hhh", "hy", "homfly", "verify-algebra", "verify-action", "verify-symmetry", "verify-lefschetz",
            "basic-object", "verify-cube", "verify-skein")

DEFAULT_WINDOW = "-10,10,-8,8"


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending position."""


@dataclass
class RunConfig:
    subcommand: str
    braid: str = ""
    strands: int = None
    window: str = DEFAULT_WINDOW
    jmax: int = 2
    fmt: str = "json"
    jobs: int = None
    seed: int = 0
    n: int = 3
    kmax: int = 4
    perm_n: int = None
    pairs: str = ""
    check: str = "model"
    method: str = "split"
    reduced: bool = False
    random_words: int = 0
    i: int = 1
    j: int = 2
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.subcommand not in COMMANDS:
            raise ConfigError("unknown subcommand %r" % self.subcommand)
        if self.fmt not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.fmt == "csv" and self.subcommand != "hhh":
            raise ConfigError("csv output is only available for hhh")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError("jobs must be positive")
        if self.jmax < 0:
            raise ConfigError("jmax must be nonnegative")
        parse_window(self.window)
        if self.subcommand in ("hhh", "hy", "homfly", "verify-action", "verify-symmetry", "verify-lefschetz"):
            if not (self.subcommand == "verify-action" and self.random_words):
                parse_braid(self.braid, self.strands)
        if self.subcommand == "basic-object":
            parse_pairs(self.pairs)
            if self.check not in ("model", "pipeline", "lefschetz"):
                raise ConfigError("check must be model, pipeline or lefschetz")
        return self

    def public(self):
        """Fields that determine the result (no parallelism)."""
        keys = {"hhh": ("braid", "strands", "window", "method", "reduced"),
                "hy": ("braid", "strands", "window", "jmax"),
                "homfly": ("braid", "strands", "window"),
                "verify-algebra": ("n", "kmax", "perm_n"),
                "verify-action": ("braid", "strands", "kmax", "random_words", "seed"),
                "verify-symmetry": ("braid", "strands", "window"),
                "verify-lefschetz": ("braid", "strands", "window", "jmax"),
                "basic-object": ("pairs", "window", "check", "jmax"),
                "verify-cube": ("i", "j", "n", "kmax"),
                "verify-skein": ("n", "i")}[self.subcommand]
        return {k: getattr(self, k) for k in keys}


# ---------------------------------------------------------------------------
# parsing with positional diagnostics


def parse_braid(text, strands=None):
    from .soergel import BraidWord

    word = []
    for m in re.finditer(r"[^\s,]+", text or ""):
        tok = m.group(0)
        if not re.fullmatch(r"[+-]?\d+", tok) or int(tok) == 0:
            raise ConfigError("braid: token %d at column %d: %r is not a nonzero integer"
                              % (len(word) + 1, m.start() + 1, tok))
        word.append((int(tok), m.start() + 1))
    n = strands if strands is not None else max([abs(s) for s, _ in word] + [0]) + 1
    for pos, (s, col) in enumerate(word, start=1):
        if abs(s) > n - 1:
            raise ConfigError("braid: token %d at column %d: generator %d needs more than %d strands"
                              % (pos, col, s, n))
    return BraidWord(n, [s for s, _ in word])


def parse_window(text):
    parts = text.split(",")
    for pos, p in enumerate(parts, start=1):
        if not re.fullmatch(r"\s*[+-]?\d+\s*", p):
            raise ConfigError("window: field %d: %r is not an integer" % (pos, p))
    try:
        return Window.parse(text)
    except ValueError as exc:
        raise ConfigError("window: %s" % exc)


def parse_pairs(text):
    from .basicobj import SurfaceData

    rest = re.sub(r"\(\s*\d+\s*,\s*\d+\s*\)", lambda m: " " * len(m.group(0)), text)
    for col, ch in enumerate(rest, start=1):
        if ch not in " ,":
            raise ConfigError("pairs: unexpected %r at column %d (expected '(n,g)' items)" % (ch, col))
    try:
        return SurfaceData.parse(text)
    except ValueError as exc:
        raise ConfigError("pairs: %s" % exc)


# ---------------------------------------------------------------------------
# handlers: each returns (ok, result)


def _poly_str(P):
    return str(sympy.expand(P))


def _table_json(table):
    return {"table": table.rows(), "meta": table.meta}


def _hhh(cfg):
    from .hochschild import hhh_table

    beta = parse_braid(cfg.braid, cfg.strands)
    T = hhh_table(beta, parse_window(cfg.window), method=cfg.method, reduced=cfg.reduced, jobs=cfg.jobs)
    return True, _table_json(T), T


def _hy(cfg):
    from .yify import hy_table, lefschetz_check

    beta = parse_braid(cfg.braid, cfg.strands)
    W = parse_window(cfg.window)
    T = hy_table(beta, W, jobs=cfg.jobs).table
    res = _table_json(T)
    ok = True
    if cfg.jmax:
        lef = lefschetz_check(beta, cfg.jmax, W, jobs=cfg.jobs)
        res["verdicts"] = lef["verdicts"]
        ok = lef["ok"]
    return ok, res


def _homfly(cfg):
    from .hochschild import hhh_table, homfly_skein, series_agree, unknot_series

    beta = parse_braid(cfg.braid, cfg.strands)
    W = parse_window(cfg.window)
    P = homfly_skein(beta)
    agree, bad = series_agree(P * unknot_series(), hhh_table(beta, W, jobs=cfg.jobs), W)
    return agree, {"homfly": _poly_str(P), "euler_agrees_in_window": agree,
                   "mismatches": sorted(str(b) for b in bad), "components": beta.components()}


def _verify_algebra(cfg):
    from .aalg import identity_suite

    rows = identity_suite(cfg.n, cfg.kmax, cfg.perm_n)
    failures = [r for r in rows if r["status"] != "pass"]
    return not failures, {"checks": rows, "count": len(rows), "failures": len(failures)}


def _verify_action(cfg):
    from .action import all_braid_words, braid_action, verify_action
    from .soergel import BraidWord

    if cfg.random_words:
        rng = random.Random(cfg.seed)
        pool = all_braid_words(4, cfg.strands or 3)
        words = [pool[rng.randrange(len(pool))] for _ in range(cfg.random_words)]
    else:
        words = [parse_braid(cfg.braid, cfg.strands)]
    reports = []
    for beta in words:
        rep = verify_action(braid_action(beta, cfg.kmax), cfg.kmax)
        reports.append({"braid": beta.word, "strands": beta.n, "ok": rep["ok"], "checks": rep["checks"],
                        "failures": rep["failures"], "rank": rep["rank"], "perm": rep["perm"]})
    assert all(isinstance(b, BraidWord) for b in words)
    return all(r["ok"] for r in reports), {"reports": reports}


def dgr_symmetry(table, window):
    """Compare dim(i, q, k) with dim(i, -q, k - q) for every populated slice whose mirror lies in the window."""
    checked, failures, unchecked = 0, [], []
    for (a, q, t), v in sorted(table.dims.items()):
        mirror = (a, -q, t - q)
        if not window.contains(*mirror):
            unchecked.append([a, q, t])
            continue
        checked += 1
        if table.get(*mirror) != v:
            failures.append({"slice": [a, q, t], "dim": v, "mirror": list(mirror), "mirror_dim": table.get(*mirror)})
    return {"checked": checked, "failures": failures, "outside_window": unchecked}


def _verify_symmetry(cfg):
    from .hochschild import homfly_euler, homfly_skein, reduced_table

    beta = parse_braid(cfg.braid, cfg.strands)
    if beta.components() != 1:
        raise ConfigError("verify-symmetry needs a knot; the closure has %d components" % beta.components())
    W = parse_window(cfg.window)
    R = reduced_table(beta, W, jobs=cfg.jobs)
    sym = dgr_symmetry(R, W)
    euler = homfly_euler(R)
    skein = homfly_skein(beta)
    euler_ok = sympy.simplify(euler - skein) == 0
    ok = not sym["failures"] and euler_ok and not sym["outside_window"]
    return ok, {"reduced": R.rows(), "total_dimension": R.total(), "symmetry": sym,
                "euler": _poly_str(euler), "homfly": _poly_str(skein), "euler_matches_homfly": euler_ok}


def _verify_lefschetz(cfg):
    from .yify import lefschetz_check

    beta = parse_braid(cfg.braid, cfg.strands)
    rep = lefschetz_check(beta, cfg.jmax, parse_window(cfg.window), jobs=cfg.jobs)
    return rep["ok"], {"verdicts": rep["verdicts"]}


def _basic_object(cfg):
    from .basicobj import YModel, model_lefschetz, model_vs_computed

    S = parse_pairs(cfg.pairs)
    W = parse_window(cfg.window)
    if cfg.check == "model":
        Ym = YModel(S)
        M = Ym.base
        rows = [{"a": 0, "q": q, "t": t, "dim": Ym.dim((0, q, t))}
                for q in range(W.qmin, W.qmax + 1) for t in range(W.tmin, W.tmax + 1) if Ym.dim((0, q, t))]
        return True, {"surface": S.to_str(), "c": S.c, "g": S.g, "s": S.s, "x_indices": M.I,
                      "xi_generators": M.xi_generators, "etas": len(M.etas), "table": rows}
    if cfg.check == "pipeline":
        rep = model_vs_computed(S, W, jobs=cfg.jobs)
        return rep["ok"], rep
    rep = model_lefschetz(S, cfg.jmax, W)
    return rep["ok"], rep


def _verify_cube(cfg):
    from .basicobj import verify_cube

    rep = verify_cube(cfg.i, cfg.j, cfg.n, cfg.kmax)
    return rep["ok"], rep


def _verify_skein(cfg):
    from .basicobj import skein_triangle

    rep = skein_triangle(cfg.n, cfg.i)
    return rep["ok"], rep


HANDLERS = {"hhh": _hhh, "hy": _hy, "homfly": _homfly, "verify-algebra": _verify_algebra,
            "verify-action": _verify_action, "verify-symmetry": _verify_symmetry,
            "verify-lefschetz": _verify_lefschetz, "basic-object": _basic_object,
            "verify-cube": _verify_cube, "verify-skein": _verify_skein}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    return str(obj)


def render(doc):
    return json.dumps(_jsonable(doc), sort_keys=True, indent=1) + "\n"


def run(config):
    """Dispatch a validated config; returns (exit status, output text)."""
    try:
        config.validate()
        out = HANDLERS[config.subcommand](config)
    except ConfigError as exc:
        return EXIT_USAGE, render({"command": config.subcommand, "status": "error", "error": str(exc)})
    ok, result = out[0], out[1]
    if config.fmt == "csv":
        return (EXIT_OK if ok else EXIT_FAIL), out[2].to_csv()
    doc = {"command": config.subcommand, "config": config.public(), "status": "pass" if ok else "fail",
           "result": result}
    return (EXIT_OK if ok else EXIT_FAIL), render(doc)


def load_schema():
    return json.loads(resources.files("kryify").joinpath("data/schema.json").read_text())


def validate_output(text, schema=None):
    jsonschema.validate(json.loads(text), schema or load_schema())


# ---------------------------------------------------------------------------
# corpus regression


CORPUS = [
    ("hhh_unknot", RunConfig("hhh", braid="", strands=1)),
    ("hhh_hopf", RunConfig("hhh", braid="1 1", strands=2)),
    ("hhh_trefoil", RunConfig("hhh", braid="1 1 1", strands=2)),
    ("hhh_trefoil_stabilized", RunConfig("hhh", braid="1 1 1 2", strands=3)),
    ("hhh_figure_eight", RunConfig("hhh", braid="1 -2 1 -2", strands=3)),
    ("hhh_trefoil_reduced", RunConfig("hhh", braid="1 1 1", strands=2, reduced=True)),
    ("hy_trefoil", RunConfig("hy", braid="1 1 1", strands=2, window="-8,8,-6,8")),
    ("homfly_trefoil", RunConfig("homfly", braid="1 1 1", strands=2)),
    ("homfly_figure_eight", RunConfig("homfly", braid="1 -2 1 -2", strands=3)),
    ("algebra_n2", RunConfig("verify-algebra", n=2, kmax=4)),
    ("action_trefoil", RunConfig("verify-action", braid="1 1 1", strands=2)),
    ("action_random", RunConfig("verify-action", strands=3, random_words=4, seed=7)),
    ("symmetry_trefoil", RunConfig("verify-symmetry", braid="1 1 1", strands=2, window="-12,12,-12,12")),
    ("lefschetz_hopf", RunConfig("verify-lefschetz", braid="1 1", strands=2, window="-8,8,-6,8")),
    ("basic_model_11", RunConfig("basic-object", pairs="(1,1),(2,0)")),
    ("basic_pipeline_11", RunConfig("basic-object", pairs="(1,1)", window="-6,6,-5,4", check="pipeline")),
    ("basic_lefschetz_22", RunConfig("basic-object", pairs="(2,2)", window="-6,6,-5,4", check="lefschetz")),
    ("cube_123", RunConfig("verify-cube", i=1, j=2, n=3)),
    ("skein_2", RunConfig("verify-skein", n=2)),
]


def golden_dir():
    return str(resources.files("kryify").joinpath("data/golden"))


def corpus_regression(directory=None, bless=False, jobs=None, names=None):
    """Run the corpus and compare with the stored golden JSON.

    Returns a report {ok, cases: [{name, status}]}; status is match, drift,
    missing, invalid (schema) or blessed.  Golden files are only written when
    bless is set.
    """
    directory = directory or golden_dir()
    schema = load_schema()
    cases = []
    for name, cfg in CORPUS:
        if names and name not in names:
            continue
        cfg = RunConfig(**{**cfg.__dict__, "jobs": jobs})
        code, text = run(cfg)
        path = os.path.join(directory, name + ".json")
        try:
            validate_output(text, schema)
        except jsonschema.ValidationError:
            cases.append({"name": name, "status": "invalid", "exit": code})
            continue
        if bless:
            with open(path, "w") as fh:
                fh.write(text)
            status = "blessed"
        elif not os.path.exists(path):
            status = "missing"
        else:
            with open(path) as fh:
                status = "match" if fh.read() == text else "drift"
        cases.append({"name": name, "status": status, "exit": code})
    ok = all(c["status"] in ("match", "blessed") and c["exit"] == EXIT_OK for c in cases)
    return {"ok": ok, "cases": cases}


# ---------------------------------------------------------------------------
# click wiring


def _emit(cfg):
    code, text = run(cfg)
    click.echo(text, nl=False)
    sys.exit(code)


@click.group()
@click.option("--jobs", type=int, default=None, envvar="KRYIFY_JOBS", help="Worker processes (default from KRYIFY_JOBS, else 1).")
@click.option("--seed", type=int, default=0, help="Seed for randomized identity tests.")
@click.pass_context
def main(ctx, jobs, seed):
    """Exact triply graded and y-ified link homology."""
    ctx.obj = {"jobs": jobs, "seed": seed}


def _braid_options(fn):
    fn = click.option("--strands", type=int, default=None, help="Number of strands (default: minimal).")(fn)
    fn = click.option("--braid", default="", help="Space separated generators, negative for inverses.")(fn)
    return fn


def _window_option(default=DEFAULT_WINDOW):
    return click.option("--window", default=default, show_default=True, help="qmin,qmax,tmin,tmax[,amin,amax]")


@main.command()
@_braid_options
@_window_option()
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--method", type=click.Choice(["split", "full"]), default="split")
@click.option("--reduced", is_flag=True, help="Reduced (x_1 = 0) homology.")
@click.pass_obj
def hhh(obj, braid, strands, window, fmt, method, reduced):
    """Normalized triply graded homology table."""
    _emit(RunConfig("hhh", braid=braid, strands=strands, window=window, fmt=fmt, method=method, reduced=reduced,
                    jobs=obj["jobs"]))


@main.command()
@_braid_options
@_window_option()
@click.option("--lefschetz", "jmax", type=int, default=0, help="Check (F_2)^j for j <= jmax.")
@click.option("--format", "fmt", type=click.Choice(["json"]), default="json")
@click.pass_obj
def hy(obj, braid, strands, window, jmax, fmt):
    """y-ified homology table with optional hard Lefschetz verdicts."""
    _emit(RunConfig("hy", braid=braid, strands=strands, window=window, jmax=jmax, fmt=fmt, jobs=obj["jobs"]))


@main.command()
@_braid_options
@_window_option()
@click.pass_obj
def homfly(obj, braid, strands, window):
    """HOMFLY-PT polynomial, checked against the Euler characteristic."""
    _emit(RunConfig("homfly", braid=braid, strands=strands, window=window, jobs=obj["jobs"]))


@main.command("verify-algebra")
@click.option("--n", type=int, default=3, show_default=True)
@click.option("--kmax", type=int, default=4, show_default=True)
@click.option("--perm-n", type=int, default=None, help="Largest symmetric group for alpha/beta (default n).")
@click.pass_obj
def verify_algebra(obj, n, kmax, perm_n):
    """Identity suite of the dg algebras."""
    _emit(RunConfig("verify-algebra", n=n, kmax=kmax, perm_n=perm_n, jobs=obj["jobs"]))


@main.command("verify-action")
@_braid_options
@click.option("--kmax", type=int, default=4, show_default=True)
@click.option("--random-words", type=int, default=0, help="Check this many random words of length <= 4 instead.")
@click.pass_obj
def verify_action_cmd(obj, braid, strands, kmax, random_words):
    """Defining identities of the action on a Rouquier complex."""
    _emit(RunConfig("verify-action", braid=braid, strands=strands, kmax=kmax, random_words=random_words,
                    seed=obj["seed"], jobs=obj["jobs"]))


@main.command("verify-symmetry")
@_braid_options
@_window_option("-12,12,-12,12")
@click.pass_obj
def verify_symmetry(obj, braid, strands, window):
    """Mirror symmetry of the reduced homology of a knot."""
    _emit(RunConfig("verify-symmetry", braid=braid, strands=strands, window=window, jobs=obj["jobs"]))


@main.command("verify-lefschetz")
@_braid_options
@_window_option("-8,8,-6,8")
@click.option("--jmax", type=int, default=2, show_default=True)
@click.pass_obj
def verify_lefschetz(obj, braid, strands, window, jmax):
    """Bijectivity of (F_2)^j between mirror slices of HY."""
    _emit(RunConfig("verify-lefschetz", braid=braid, strands=strands, window=window, jmax=jmax, jobs=obj["jobs"]))


@main.command("basic-object")
@click.option("--pairs", required=True, help="Surface data, e.g. '(1,1),(2,0)'.")
@_window_option("-6,6,-5,4")
@click.option("--check", type=click.Choice(["model", "pipeline", "lefschetz"]), default="model")
@click.option("--jmax", type=int, default=2, show_default=True)
@click.pass_obj
def basic_object(obj, pairs, window, check, jmax):
    """Closed-form model of a basic object, optionally compared with the pipeline."""
    _emit(RunConfig("basic-object", pairs=pairs, window=window, check=check, jmax=jmax, jobs=obj["jobs"]))


@main.command("verify-cube")
@click.option("--i", "i", type=int, default=1)
@click.option("--j", "j", type=int, default=2)
@click.option("--n", type=int, default=3)
@click.option("--kmax", type=int, default=4)
def verify_cube_cmd(i, j, n, kmax):
    """Cube presentation of the Koszul object K_ij."""
    _emit(RunConfig("verify-cube", i=i, j=j, n=n, kmax=kmax))


@main.command("verify-skein")
@click.option("--n", type=int, default=2)
@click.option("--i", "i", type=int, default=1)
def verify_skein(n, i):
    """Contractibility of the three-term skein twisted complex."""
    _emit(RunConfig("verify-skein", n=n, i=i))


@main.command()
@click.option("--golden", type=click.Path(file_okay=False), default=None, help="Golden directory (default: shipped).")
@click.option("--bless", is_flag=True, help="Rewrite the golden files.")
@click.option("--case", "names", multiple=True, help="Restrict to named cases.")
@click.pass_obj
def regress(obj, golden, bless, names):
    """Corpus regression against golden JSON."""
    rep = corpus_regression(golden, bless=bless, jobs=obj["jobs"], names=set(names) or None)
    click.echo(json.dumps(rep, sort_keys=True, indent=1))
    sys.exit(EXIT_OK if rep["ok"] else EXIT_FAIL)


if __name__ == "__main__":
    main()
