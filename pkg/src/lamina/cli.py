"""Command line front end: ``lamina run`` and ``lamina reproduce strubel``.

Exit codes: 0 pass, 1 violations found, 2 computation error, 3 config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from lamina import config as config_mod
from lamina.config import ConfigError, RunConfig
from lamina.currents import (
    CSV_HEADER,
    ChartOracle,
    FramingOracle,
    atom_scan,
    axiom_suite,
    barycenter_compatibility_check,
    framed_domain,
    period,
    period_basepoints,
    render_value,
)
from lamina.framed_rep import Representation, representation_from_config, strubel_unipotent
from lamina.fuchsian import GroupWord, enumerate_words, evaluate_mobius
from lamina.linalg import Matrix
from lamina.siegel import act, barycenter, d1_distance
from lamina.symplectic import Lagrangian, apply, random_positive_definite, random_sp
from lamina.valued import Exponent, FieldParams, LaminaError, as_exponent_pair_str

EXIT_PASS, EXIT_VIOLATIONS, EXIT_COMPUTATION, EXIT_CONFIG = 0, 1, 2, 3


class ComputationError(LaminaError, RuntimeError):
    def __init__(self, message: str, word: Optional[str] = None):
        super().__init__(message)
        self.word = word


# --------------------------------------------------------------------------
# rendering


def exact(e) -> str:
    return "" if e is None else as_exponent_pair_str(e)


def decimal(e) -> str:
    return "" if e is None else repr(float(e))


# --------------------------------------------------------------------------
# commands


def length_row(rho: Representation, w: GroupWord) -> dict:
    try:
        L = rho.length(w)
        regular = rho.is_shilov_regular(w)
        tv = rho.T(w).valuation() if rho.n == 2 else None
    except LaminaError as e:
        raise ComputationError(f"word {w}: {e}", str(w)) from e
    except (ArithmeticError, ValueError) as e:
        raise ComputationError(f"word {w}: {e}", str(w)) from e
    agree = None if tv is None else (L == tv * -2)
    return {"word": str(w), "L": L, "shilov_regular": regular, "T_valuation": tv, "agree": agree}


LENGTH_COLUMNS = ["word", "L", "L_decimal", "shilov_regular", "T_valuation", "T_valuation_decimal",
                  "agree"]


def length_csv_row(r: dict) -> list:
    return [r["word"], exact(r["L"]), decimal(r["L"]), str(r["shilov_regular"]).lower(),
            exact(r["T_valuation"]), decimal(r["T_valuation"]),
            "" if r["agree"] is None else str(r["agree"]).lower()]


def run_lengths(rho: Representation, words: Sequence[GroupWord]) -> dict:
    rows = [length_row(rho, w) for w in words]
    violations = [r["word"] for r in rows if r["agree"] is False]
    return {"name": "lengths", "rows": rows, "violations": violations,
            "csv": (LENGTH_COLUMNS, [length_csv_row(r) for r in rows])}


def usable_for_periods(rho: Representation, w: GroupWord) -> bool:
    return evaluate_mobius(w).classify() == "hyperbolic" and rho.is_shilov_regular(w)


def run_periods(rho: Representation, words: Sequence[GroupWord], basepoints: int, precision,
                domain_max_len: int = 4, translates: Sequence[str] = ("", "a", "b", "A", "B")) -> dict:
    oracle = FramingOracle(rho, framed_domain(rho, domain_max_len, translates), precision)
    rows, violations = [], []
    for w in words:
        if not usable_for_periods(rho, w):
            rows.append({"word": str(w), "skipped": "not hyperbolic and Shilov regular"})
            continue
        try:
            L = rho.length(w)
            xs = period_basepoints(oracle, w, basepoints)
            vals = [period(oracle, w, x) for x in xs]
        except LaminaError as e:
            raise ComputationError(f"word {w}: {e}", str(w)) from e
        ok = len(xs) >= min(basepoints, 1) and all(v == L for v in vals)
        row = {"word": str(w), "L": L, "periods": vals, "basepoints": [str(x.point) for x in xs],
               "agree": ok}
        rows.append(row)
        if not ok:
            violations.append(str(w))
    cols = ["word", "L", "L_decimal", "periods", "basepoints", "agree"]
    csv_rows = []
    for r in rows:
        if "skipped" in r:
            csv_rows.append([r["word"], "", "", "", "", "skipped"])
        else:
            csv_rows.append([r["word"], exact(r["L"]), decimal(r["L"]),
                             " ".join(exact(v) for v in r["periods"]), " ".join(r["basepoints"]),
                             str(r["agree"]).lower()])
    return {"name": "periods", "rows": rows, "violations": violations, "csv": (cols, csv_rows)}


def run_cr_axioms(rho: Representation, samples: int, seed: int, precision,
                  domain_max_len: int = 4, translates: Sequence[str] = ("", "a", "B")) -> dict:
    oracle = FramingOracle(rho, framed_domain(rho, domain_max_len, translates), precision)
    rep = axiom_suite(oracle, samples, seed)
    violations = [c.name for c in rep.checks if not c.informational and not c.passed]
    return {"name": "cr-axioms", "report": rep.to_json(), "violations": violations,
            "csv": (CSV_HEADER, rep.csv_rows())}


def run_atom_scan(rho: Representation, candidates: Sequence[GroupWord], depth: int, precision,
                  max_levels: Optional[int] = None, domain_max_len: int = 4,
                  translates: Sequence[str] = ("", "a", "b", "A", "B")) -> dict:
    oracle = FramingOracle(rho, framed_domain(rho, domain_max_len, translates), precision)
    cands = [w for w in candidates if evaluate_mobius(w).classify() == "hyperbolic"]
    reports = atom_scan(oracle, cands, depth=depth, max_levels=max_levels)
    violations = []
    for r in reports:
        if r.error is None and r.stabilized and (r.weight is None or r.weight.denominator != 1):
            violations.append(str(r.candidate))
        if r.error is None and any(b > a for a, b in zip(r.masses, r.masses[1:])):
            violations.append(str(r.candidate))
    cols = ["candidate", "masses", "stabilized", "weight", "unit", "error"]
    rows = [[str(r.candidate), " ".join(exact(m) for m in r.masses), str(r.stabilized).lower(),
             "" if r.weight is None else str(r.weight), "" if r.unit is None else str(r.unit),
             r.error or ""] for r in reports]
    return {"name": "atom-scan", "reports": [r.to_json() for r in reports],
            "violations": sorted(set(violations)), "csv": (cols, rows)}


def standard_maximal_tuple(field: FieldParams, n: int, k: int, rng: random.Random) -> list:
    """Charts ``X_0 < X_1 < ... < X_{k-2}`` (positive definite steps) followed by infinity."""
    X = Matrix.zeros(field, n)
    out = [Lagrangian.chart(X)]
    for _ in range(k - 2):
        X = X + random_positive_definite(field, n, rng)
        out.append(Lagrangian.chart(X))
    out.append(Lagrangian.infinity(field, n))
    return out


def run_barycenter_check(field: FieldParams, n: int, samples: int, seed: int) -> dict:
    rng = random.Random(seed)
    pts = standard_maximal_tuple(field, n, 7, rng)
    g = random_sp(field, n, rng)
    pts = [apply(g, l) for l in pts]
    oracle = ChartOracle(pts)
    rep = barycenter_compatibility_check(oracle, barycenter, d1_distance, samples, seed)
    # equivariance on the standard triple
    base = [Lagrangian.zero(field, n), Lagrangian.chart(Matrix.identity(field, n)),
            Lagrangian.infinity(field, n)]
    eq_fail = 0
    for _ in range(samples):
        h = random_sp(field, n, rng)
        if not barycenter(*(apply(h, l) for l in base)) == act(h, barycenter(*base)):
            eq_fail += 1
    out = rep.to_json()
    out["equivariance_samples"] = samples
    out["equivariance_violations"] = eq_fail
    violations = [v["inputs"] for v in out["violations"]] + (["equivariance"] if eq_fail else [])
    rows = [["barycenter_compatibility", rep.samples, len(rep.violations)],
            ["equivariance", samples, eq_fail]]
    return {"name": "barycenter-check", "report": out, "violations": violations,
            "csv": (["check", "samples", "violations"], rows)}


def closed_forms(field: FieldParams) -> dict:
    """The two piecewise formulas for ``v(T)``."""
    a = Exponent(Fraction(0), Fraction(1), field.alpha)
    return {
        "AAB": min(field.wrap(field.raw(-2)), a * 4 - 4, a * 2 - 2),
        "Ab": min(field.wrap(field.raw(-2)), a * 4 - 2, a * 2 - 2),
    }


STRUBEL_WORDS = {"AAB": "c1^-1 c3", "Ab": "c1^-1 c2"}


def run_reproduce_strubel(alphas: Sequence, expected: Optional[dict] = None, precision=16) -> dict:
    """``v(T)`` of the two distinguished words against the closed forms (or planted values)."""
    rows, violations = [], []
    for alpha in alphas:
        rho = strubel_unipotent(str(alpha), precision=precision)
        f = rho.field
        forms = closed_forms(f)
        planted = (expected or {}).get(str(alpha), {})
        for w, label in STRUBEL_WORDS.items():
            try:
                got = rho.T(w).valuation()
            except LaminaError as e:
                raise ComputationError(f"alpha {alpha}, word {w}: {e}", w) from e
            exp = forms[w]
            if label in planted or w in planted:
                exp = Exponent.from_json(_exp_obj(planted.get(label, planted.get(w))), f.alpha)
            ok = got == exp
            rows.append({"alpha": str(f.alpha), "word": w, "element": label, "computed": got,
                         "expected": exp, "match": ok})
            if not ok:
                violations.append(f"alpha={f.alpha} {label}: computed {got}, expected {exp}")
    cols = ["alpha", "word", "element", "computed", "computed_decimal", "expected",
            "expected_decimal", "match"]
    csv_rows = [[r["alpha"], r["word"], r["element"], exact(r["computed"]), decimal(r["computed"]),
                 exact(r["expected"]), decimal(r["expected"]), str(r["match"]).lower()] for r in rows]
    return {"name": "reproduce-strubel", "rows": rows, "violations": violations,
            "csv": (cols, csv_rows)}


def _exp_obj(v):
    if isinstance(v, dict):
        return v
    return {"a": str(v), "b": "0"}


# --------------------------------------------------------------------------
# config runs


def _jsonable(obj):
    if isinstance(obj, Exponent):
        return render_value(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items() if k != "csv"}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def resolve_words(cfg: RunConfig) -> list:
    words_cfg = cfg.raw.get("words")
    if words_cfg is None:
        return [GroupWord.parse(w) for w in ("AAB", "Ab", "a", "aab", "abb")]
    if isinstance(words_cfg, list):
        return [GroupWord.parse(w) for w in words_cfg]
    if "corpus" in words_cfg:
        p = Path(words_cfg["corpus"])
        if not p.is_absolute():
            p = cfg.base_dir / p
        try:
            lines = p.read_text().splitlines()
        except OSError as e:
            raise ConfigError(f"cannot read corpus {p}: {e}") from None
        words = []
        for ln in lines:
            ln = ln.split("#", 1)[0].strip()
            if ln:
                if set(ln) - set("aAbB"):
                    raise ConfigError(f"corpus line {ln!r} is not a word in a, A, b, B")
                words.append(GroupWord.parse(ln))
        return words
    e = words_cfg["enumerate"]
    return list(enumerate_words(e["max_len"], cyclic=e.get("cyclic", True),
                                canonical=e.get("canonical", True), min_len=e.get("min_len", 1)))


def build_representation(cfg: RunConfig) -> Representation:
    rep_cfg = dict(cfg.representation)
    rep_cfg.setdefault("alpha", str(cfg.field["alpha"]))
    rep_cfg.setdefault("backend", cfg.field.get("backend", "exact"))
    try:
        return representation_from_config(rep_cfg, precision=cfg.precision, seed=cfg.seed or 0)
    except LaminaError:
        raise
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"representation: {e}") from None


def execute(cfg: RunConfig) -> tuple[int, list]:
    """Run every command; returns ``(exit code, results)``."""
    results = []
    rho = None
    words = None
    seed = cfg.seed if cfg.seed is not None else 0
    for cmd in cfg.commands:
        name = cmd["name"]
        if name == "reproduce-strubel":
            alphas = cmd.get("alphas", [cfg.field["alpha"]])
            results.append(run_reproduce_strubel(alphas, cmd.get("expected"), cfg.precision))
            continue
        if name == "barycenter-check":
            f = FieldParams.from_alpha(str(cfg.field["alpha"]))
            results.append(run_barycenter_check(f, cmd.get("n", 2), cmd.get("samples", 20), seed))
            continue
        if rho is None:
            rho = build_representation(cfg)
        if words is None:
            words = resolve_words(cfg)
        dml = cmd.get("domain_max_len", 4)
        if name == "lengths":
            results.append(run_lengths(rho, words))
        elif name == "periods":
            results.append(run_periods(rho, words, cmd.get("basepoints", 3), cfg.precision, dml))
        elif name == "cr-axioms":
            tr = cmd.get("translates", ["", "a", "B"])
            results.append(run_cr_axioms(rho, cmd.get("samples", 50), seed, cfg.precision, dml, tr))
        elif name == "atom-scan":
            cands = [GroupWord.parse(w) for w in cmd["candidates"]] if "candidates" in cmd else words
            results.append(run_atom_scan(rho, cands, cmd.get("depth", 3), cfg.precision,
                                         cmd.get("max_levels"), dml))
    code = EXIT_VIOLATIONS if any(r["violations"] for r in results) else EXIT_PASS
    return code, results


def render(results: list, fmt: str, cfg_raw: Optional[dict] = None) -> dict:
    """``{suffix: text}``; one CSV per command, or a single JSON document."""
    if fmt == "json":
        doc = {"config": cfg_raw, "results": [_jsonable(r) for r in results],
               "summary": {"commands": len(results),
                           "violations": sum(len(r["violations"]) for r in results)}}
        return {"": json.dumps(doc, indent=2, sort_keys=True) + "\n"}
    out = {}
    for r in results:
        cols, rows = r["csv"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(rows)
        out["" if len(results) == 1 else "_" + r["name"]] = buf.getvalue()
    return out


def write_outputs(texts: dict, path: Optional[str], fmt: str, stream=None):
    if path is None:
        stream = stream or sys.stdout
        for text in texts.values():
            stream.write(text)
        return
    p = Path(path)
    for suffix, text in texts.items():
        target = p if not suffix else p.with_name(p.stem + suffix + (p.suffix or "." + fmt))
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text)


# --------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lamina")
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="run the commands of a JSON config")
    run.add_argument("config")
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    rep = sub.add_parser("reproduce", help="reproduce the Strubel valuation tables")
    rep.add_argument("family", choices=["strubel"])
    rep.add_argument("--alpha", default="-1,0,1/4,1/2,3/4,1,2")
    rep.add_argument("--expected", help="JSON file of planted expectations {alpha: {word: value}}")
    rep.add_argument("--format", choices=["csv", "json"], default="csv")
    rep.add_argument("--out")
    return ap


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_PASS
    try:
        if args.cmd == "reproduce":
            alphas = [a.strip() for a in args.alpha.split(",") if a.strip()]
            expected = None
            if args.expected:
                try:
                    expected = json.loads(Path(args.expected).read_text())
                except (OSError, json.JSONDecodeError) as e:
                    raise ConfigError(f"cannot read expectations: {e}") from None
            res = run_reproduce_strubel(alphas, expected)
            write_outputs(render([res], args.format), args.out, args.format, stdout)
            for v in res["violations"]:
                stderr.write(f"diff: {v}\n")
            return EXIT_VIOLATIONS if res["violations"] else EXIT_PASS
        cfg = config_mod.load(args.config, {"seed": args.seed} if args.seed is not None else None)
        out = cfg.output
        fmt = out.get("format", "json")
        path = args.out or out.get("path")
        if path is not None and args.out is None and not Path(path).is_absolute():
            path = str(cfg.base_dir / path)
        code, results = execute(cfg)
        write_outputs(render(results, fmt, cfg.raw), path, fmt, stdout)
        for r in results:
            for v in r["violations"]:
                stderr.write(f"violation in {r['name']}: {v}\n")
        return code
    except ConfigError as e:
        stderr.write(f"config error: {e}\n")
        return EXIT_CONFIG
    except (LaminaError, ArithmeticError, ValueError) as e:
        stderr.write(f"computation error: {e}\n")
        return EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
