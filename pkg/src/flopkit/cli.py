"""flopkit command line.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 for usage or configuration errors (including inputs that violate the
hypotheses of a command).
"""
import functools
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from importlib import resources
from typing import Optional

import click

from .linalg import Field
from . import fdrep, nccr, derived

MAX_ADAMS = 64
MAX_K = 12
THREADS_ENV = "FLOPKIT_THREADS"


class MathFailure(click.ClickException):
    exit_code = 1


class ConfigError(click.ClickException):
    exit_code = 2


@dataclass
class RunConfig:
    field: str = "q"
    k: Optional[int] = None
    n: Optional[int] = None
    max_degree: Optional[int] = None
    output: str = "text"
    seed: int = 0
    threads: int = 1

    @property
    def F(self) -> Field:
        return Field.parse(self.field)


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        t = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if t < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return t


def _make_config(field="q", k=None, n=None, max_degree=None, output="text", seed=0) -> RunConfig:
    try:
        F = Field.parse(field)
    except ValueError as e:
        raise ConfigError(str(e))
    if k is not None and not 1 <= k <= MAX_K:
        raise ConfigError(f"k must be in 1..{MAX_K}, got {k}")
    if n is not None and n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    if max_degree is not None and not 0 <= max_degree <= MAX_ADAMS:
        raise ConfigError(f"degree budget exceeded: Adams degree {max_degree} is outside 0..{MAX_ADAMS}")
    return RunConfig(f"p:{F.p}" if F.p else "q", k, n, max_degree, output, seed, _threads())


def common(fn):
    fn = click.option("--seed", type=int, default=0, show_default=True,
                      help="Seed for any randomness.")(fn)
    return click.option("--output", type=click.Choice(["text", "json", "dot"]), default="text",
                        show_default=True, help="Output format.")(fn)


def _field_option(fn):
    return click.option("--field", default="q", show_default=True,
                        help="q for the rationals or p:PRIME.")(fn)


def emit(cfg: RunConfig, command: str, ok: bool, result, text: str):
    if cfg.output == "json":
        doc = {"command": command, "config": asdict(cfg), "ok": ok, "result": result}
        click.echo(json.dumps(doc, indent=2, sort_keys=True, default=str))
    elif cfg.output == "dot":
        raise ConfigError(f"--output dot is only available for 'ar'")
    else:
        click.echo(text, nl=not text.endswith("\n"))
    if not ok:
        raise MathFailure(f"{command}: check failed")


def _path_str(p) -> str:
    return "*".join(p[2]) if p[2] else f"e{p[0]}"


_ALGEBRAS = {"lambda_con": fdrep.lambda_con, "gamma_con": fdrep.gamma_con,
             "truncated": fdrep.truncated_two_cycle}


def _algebra(which: str, cfg: RunConfig):
    try:
        return _ALGEBRAS[which](cfg.k, cfg.F)
    except ValueError as e:
        raise ConfigError(str(e))


@click.group()
@click.version_option(package_name="flopkit")
def main():
    """Exact computations for contraction algebras, NCCRs and spherical objects."""


# algebra ---------------------------------------------------------------------

@main.group()
def algebra():
    """Finite-dimensional contraction algebras."""


@algebra.command("info")
@click.option("--which", type=click.Choice(sorted(_ALGEBRAS)), required=True)
@click.option("--k", type=int, required=True)
@_field_option
@common
def algebra_info(which, k, field, output, seed):
    """Dimension, path basis and relations."""
    cfg = _make_config(field, k=k, output=output, seed=seed)
    A = _algebra(which, cfg)
    expected = {"lambda_con": 2 + 4 * k, "gamma_con": k + 5, "truncated": 2 + 4 * k}[which]
    checks = {"dimension formula": A.dim == expected}
    if which == "truncated":
        checks["matches lambda_con"] = fdrep.same_structure(A, fdrep.lambda_con(k, cfg.F))
    ok = all(checks.values())
    result = {"algebra": A.name, "dim": A.dim, "expected_dim": expected,
              "basis": [_path_str(p) for p in A.basis],
              "relations": [str(r) for r in A.relations], "checks": checks}
    lines = [f"algebra: {A.name} over {cfg.F}", f"dim: {A.dim}",
             "basis: " + " ".join(result["basis"]),
             "relations:"] + [f"  {r}" for r in result["relations"]]
    lines += [f"{name}: {str(v).lower()}" for name, v in checks.items()]
    emit(cfg, "algebra info", ok, result, "\n".join(lines))


# representation theory -------------------------------------------------------

def _golden_k1() -> str:
    text = resources.files("flopkit").joinpath("data/homtable_k1.txt").read_text()
    return "".join(l for l in text.splitlines(keepends=True) if not l.startswith("#"))


@main.command()
@click.option("--k", type=int, default=1, show_default=True)
@_field_option
@click.option("--golden/--no-golden", default=True, show_default=True,
              help="For k = 1, compare against the bundled reference table.")
@common
def homtable(k, field, golden, output, seed):
    """dim Hom between Q1, Q2, M1, M2, S1, S2 over lambda_con(k)."""
    cfg = _make_config(field, k=k, output=output, seed=seed)
    table = fdrep.hom_table(fdrep.lambda_con(k, cfg.F))
    text = fdrep.format_table(table)
    ok, result = True, {"order": fdrep.HOM_ORDER, "table": table}
    if golden and k == 1:
        ok = text == _golden_k1()
        result["golden_match"] = ok
    emit(cfg, "homtable", ok, result, text)


@main.command()
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--which", type=click.Choice(["lambda_con", "gamma_con"]), default="lambda_con",
              show_default=True)
@_field_option
@click.option("--dot", "as_dot", is_flag=True, help="Same as --output dot.")
@common
def ar(k, which, field, as_dot, output, seed):
    """Auslander-Reiten quiver by knitting."""
    cfg = _make_config(field, k=k, output="dot" if as_dot else output, seed=seed)
    Q = fdrep.ar_quiver(_algebra(which, cfg))
    data = Q.to_data()
    ok = data["mesh_ok"]
    if cfg.output == "dot":
        click.echo(Q.to_dot(), nl=False)
        if not ok:
            raise MathFailure("ar: mesh relations fail")
        return
    lines = [f"AR quiver of {data['algebra']}: {len(data['nodes'])} indecomposables"]
    for nd in data["nodes"]:
        tag = " (projective)" if nd["projective"] else ""
        lines.append(f"  {nd['id']}: {nd['label']} {tuple(nd['dim_vector'])}{tag}")
    lines.append("arrows: " + ", ".join(f"{a['source']}->{a['target']}" +
                                         (f" x{a['multiplicity']}" if a["multiplicity"] > 1 else "")
                                         for a in data["arrows"]))
    lines.append("tau: " + ", ".join(f"{t['node']}->{t['tau']}" for t in data["tau"]))
    lines.append(f"mesh relations: {'ok' if ok else 'FAIL'}")
    emit(cfg, "ar", ok, data, "\n".join(lines))


_BRICK_DIMS = sorted([(1, 0), (0, 1), (1, 1), (1, 1)])


@main.command()
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--which", type=click.Choice(["lambda_con", "gamma_con"]), default="lambda_con",
              show_default=True)
@_field_option
@common
def bricks(k, which, field, output, seed):
    """Indecomposables with one-dimensional endomorphism ring."""
    cfg = _make_config(field, k=k, output=output, seed=seed)
    found = fdrep.bricks(_algebra(which, cfg))
    rows = [{"label": fdrep.label_module(b), "dim_vector": list(b.dim_vector)} for b in found]
    ok = sorted(tuple(r["dim_vector"]) for r in rows) == _BRICK_DIMS
    lines = [f"{len(rows)} bricks"] + [f"  {r['label']} {tuple(r['dim_vector'])}" for r in rows]
    emit(cfg, "bricks", ok, {"count": len(rows), "bricks": rows}, "\n".join(lines))


@main.command()
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--which", type=click.Choice(["lambda_con", "gamma_con"]), default="lambda_con",
              show_default=True)
@_field_option
@common
def orthogonality(k, which, field, output, seed):
    """Hom(A, B) = 0 forces A or B to be filtered by one simple."""
    cfg = _make_config(field, k=k, output=output, seed=seed)
    rep = fdrep.orthogonality_report(_algebra(which, cfg))
    if rep["ok"]:
        text = (f"{rep['algebra']}: ok ({rep['indecomposables']} indecomposables, "
                f"{rep['pairs_checked']} pairs checked)")
    else:
        c = rep["counterexample"]
        text = f"{rep['algebra']}: FAIL, Hom({'+'.join(c['A'])}, {'+'.join(c['B'])}) = 0"
    emit(cfg, "orthogonality", rep["ok"], rep, text)


# NCCR ------------------------------------------------------------------------

@main.group("nccr")
def nccr_group():
    """Graded NCCR algebras, simple resolutions and Massey preparations."""


@nccr_group.command("verify")
@click.option("--n", type=int, required=True)
@_field_option
@click.option("--degree", type=int, default=None, help="Check exactness up to this Adams degree.")
@common
def nccr_verify(n, field, degree, output, seed):
    """Resolution exactness for both simples, plus the Massey identities when n >= 1."""
    cfg = _make_config(field, n=n, max_degree=degree, output=output, seed=seed)
    degree = 4 * n + 8 if degree is None else degree
    ctx = nccr.NCCRContext(n, cfg.F, max_degree=max(degree, 4 * n + 10))
    jobs = {f"resolution S{i}": functools.partial(nccr.verify_resolution, ctx.P[i], i, degree)
            for i in (1, 2)}
    if n >= 1:
        jobs["massey"] = functools.partial(nccr.verify_massey_prep, ctx)
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        futures = {name: pool.submit(job) for name, job in jobs.items()}
        reports = {name: f.result() for name, f in futures.items()}
    lines, summary = [], {}
    for i in (1, 2):
        r = reports[f"resolution S{i}"]
        summary[f"resolution S{i}"] = {"ok": r["ok"], "exact": r["exact"],
                                       "d_squared_zero": r["d_squared_zero"],
                                       "failures": r["failures"], "up_to_adams": degree}
        lines.append(f"resolution of S{i} up to Adams degree {degree}: {'pass' if r['ok'] else 'FAIL'}")
    if n >= 1:
        m = reports["massey"]
        summary["massey"] = m
        for c in m["checks"]:
            lines.append(f"[{c['part']}] {c['identity']}: {'pass' if c['ok'] else 'FAIL'}")
        ts = sorted({int(c["identity"].split("^")[1].split()[0]) for c in m["checks"] if c["part"] == "3"})
        n3 = sum(c["part"] == "3" for c in m["checks"])
        summary["part3_t_values"] = ts
        lines.append(f"part 3: {len(ts)} t-values ({', '.join(map(str, ts)) or 'none'}), {n3} identities")
    else:
        lines.append("n = 0: Massey identities need n >= 1, resolution checks only")
    ok = all(v["ok"] for k_, v in summary.items() if isinstance(v, dict))
    lines.append("all pass" if ok else "FAILURES present")
    emit(cfg, "nccr verify", ok, summary, "\n".join(lines))


@nccr_group.command("ext-hilbert")
@click.option("--n", type=int, required=True)
@_field_option
@common
def nccr_ext_hilbert(n, field, output, seed):
    """Total dimensions of Ext^0..Ext^3 of S1 + S2."""
    cfg = _make_config(field, n=n, output=output, seed=seed)
    dims = nccr.ext_hilbert(nccr.NCCRContext(n, cfg.F))
    emit(cfg, "nccr ext-hilbert", dims == [2, 2, 2, 2], {"dims": dims}, " ".join(map(str, dims)))


# classification -----------------------------------------------------------------

def _k1_module(label: str, F: Field):
    mods = fdrep.standard_modules(derived.contraction_algebra(F))
    if label not in mods:
        raise ConfigError(f"unknown module label {label!r}; use one of {', '.join(sorted(mods))}")
    return mods[label]


def _round_trip(word, terminal, original) -> bool:
    back = derived.act(word.inverse(), terminal)
    return derived.quasi_iso_equal(back, original)


def _precondition(fn):
    try:
        return fn()
    except (derived.ReductionError, derived.NotABrick) as e:
        raise ConfigError(f"precondition failed: {e}")


@main.command()
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--word", default="", help='Letters P1, P1^-1, P2, P2^-1, [1], [-1], e.g. "P1 P1 P2".')
@click.option("--random-length", type=int, default=None,
              help="Ignore --word and draw a seeded random word of this length.")
@click.option("--seed-object", type=click.Choice(["S1", "S2", "M1"]), default="S2", show_default=True)
@_field_option
@common
def classify(k, word, random_length, seed_object, field, output, seed):
    """Apply a groupoid word to a seed brick, then classify the result."""
    cfg = _make_config(field, k=k, output=output, seed=seed)
    if k != 1:
        raise ConfigError("chain-level classification needs k = 1; use 'reduce --shadow' for k > 1")
    try:
        w = (derived.random_word(random.Random(seed), random_length) if random_length is not None
             else derived.GroupoidWord.parse(word))
    except ValueError as e:
        raise ConfigError(str(e))
    x = derived.act(w, derived.CObject.module(_k1_module(seed_object, cfg.F), name=seed_object))
    c = _precondition(lambda: derived.classify_spherical(x))
    terminal = derived.CObject.module(_k1_module(c.terminal, cfg.F), degree=-c.shift)
    ok = _round_trip(c.word, terminal, x) and c.trace.strictly_decreasing()
    # the recovered word leaves from the chamber the input word ended in
    rec = derived.GroupoidWord(c.word.letters, w.end)
    loop = derived.GroupoidWord(w.letters + c.word.letters + c.to_simple.letters, w.start)
    cd = c.to_dict()
    cd["word"] = rec.to_dict()
    result = {"input": {"seed_object": seed_object, "word": w.to_dict()},
              "classification": cd, "loop": loop.to_dict(), "round_trip": ok}
    braid = loop.braid_string()
    lines = [f"input: {w.phi_string()} applied to {seed_object}",
             f"normal form: {c.normal_form}[{c.shift}]",
             f"terminal brick: {c.terminal} in degree {-c.shift}",
             f"simple: {c.simple}" + (f" via {c.to_simple.phi_string()}" if len(c.to_simple) else ""),
             f"word: {rec.phi_string()}",
             f"seed to simple: {loop.phi_string()}",
             f"pure braid: {braid if braid is not None else 'n/a (path does not close)'}",
             "trace:"]
    lines += [f"  {s.end}: {' '.join(s.letters)}  ell {s.ell_before} -> {s.ell_after}"
              for s in c.trace.steps] or ["  (already a shifted brick)"]
    lines.append(f"round trip: {'ok' if ok else 'FAIL'}")
    emit(cfg, "classify", ok, result, "\n".join(lines))


def _parse_items(items):
    out = []
    for it in items:
        if isinstance(it, str):
            label, _, mult = it.partition("^")
            out += [label.strip()] * (int(mult) if mult else 1)
        elif isinstance(it, (list, tuple)) and len(it) == 2:
            out += [str(it[0])] * int(it[1])
        else:
            raise ValueError(f"bad item {it!r}; use \"S1\", \"S1^2\" or [\"S1\", 2]")
    return out


def load_shadow_input(path: str):
    """[[degree, [labels]], ...] or {"degree": [labels]}; labels take multiplicities."""
    with open(path) as fh:
        raw = json.load(fh)
    pairs = raw.items() if isinstance(raw, dict) else raw
    data = {}
    for entry in pairs:
        deg, items = entry
        data.setdefault(int(deg), []).extend(_parse_items(items))
    if not any(data.values()):
        raise ValueError("input describes the zero object")
    return data


def _object_from_labels(data, F: Field):
    x = None
    for deg, labels in sorted(data.items()):
        for lab in labels:
            y = derived.CObject.module(_k1_module(lab, F), degree=deg)
            x = y if x is None else x.direct_sum(y)
    return x


@main.command("reduce")
@click.option("--input", "path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--shadow", is_flag=True, help="Work with cohomology data only (any k).")
@click.option("--k", type=int, default=1, show_default=True)
@_field_option
@common
def reduce_cmd(path, shadow, k, field, output, seed):
    """Run the length-dropping loop on an object given by its cohomology."""
    cfg = _make_config(field, k=k, output=output, seed=seed)
    try:
        data = load_shadow_input(path)
    except (ValueError, TypeError, json.JSONDecodeError) as e:
        raise ConfigError(f"bad input file: {e}")
    if shadow:
        try:
            x = derived.ShadowObject.from_labels(k, data)
        except ValueError as e:
            raise ConfigError(str(e))
        word, term, steps = _precondition(lambda: derived.shadow_reduce(k, x))
        flagged = any(s.flag for s in steps)
        result = {"word": word.to_dict(), "terminal": term.to_dict(),
                  "steps": [s.to_dict() for s in steps], "ambiguous": flagged}
        lines = [f"shadow reduction, k = {k}"]
        lines += [f"  {s.letter} ({s.end}) ell {s.ell_before} -> "
                  f"{'?' if s.ell_after is None else s.ell_after}" + (f"  {s.flag}" if s.flag else "")
                  for s in steps]
        lines += [f"word: {word.phi_string()}",
                  "terminal: " + ", ".join(f"H^{p} = {d}" for p, d in sorted(term.degrees.items()))]
        if flagged:
            lines.append("AMBIGUOUS: some steps depend on extension data the shadow does not record")
        emit(cfg, "reduce", True, result, "\n".join(lines))
        return
    if k != 1:
        raise ConfigError("chain-level reduction needs k = 1; pass --shadow for k > 1")
    x = _object_from_labels(data, cfg.F)
    word, term, trace = _precondition(lambda: derived.reduce(x))
    ok = _round_trip(word, term, x) and trace.strictly_decreasing()
    labels = derived.cohomology_labels(term)
    result = {"word": word.to_dict(), "terminal": {p: list(v) for p, v in labels.items()},
              "trace": trace.to_dict(), "ells": trace.ells(), "round_trip": ok}
    lines = [f"word: {word.phi_string()}",
             "terminal: " + ", ".join(f"H^{p} = {' + '.join(v)}" for p, v in sorted(labels.items())),
             "ell: " + " ".join(map(str, trace.ells())),
             f"round trip: {'ok' if ok else 'FAIL'}"]
    emit(cfg, "reduce", ok, result, "\n".join(lines))


if __name__ == "__main__":
    sys.exit(main())
