"""Command line interface: conic-zeros decompose|count|predict|verify|paper-repro."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from . import exactlinalg as la
from .autjreduce import minimal_zeros
from .counting import (L2, SUP, W0, brute_force_zeros, count_class, default_workers,
                       predict_total, psi, sieve_identity_check, sieve_setup)
from .decompose import decompose, verify_decomposition
from .density import (SHARP_L2, SHARP_SUP, SMOOTH, DEFAULT_T, Weight, eigen_diagnostics,
                      sigma_infinity_2d, sigma_infinity_3d)
from .errors import ConicZerosError, MalformedFormError, OracleMismatchError
from .forms import parse_form, read_form_file, stats

WEIGHT_FOR = {SUP: SHARP_SUP, L2: SHARP_L2, W0: SMOOTH}


def parse_b_values(spec: str) -> list:
    """'a..b:s' range, comma list, or a single number."""
    spec = spec.strip()
    try:
        if ".." in spec:
            rng, _, step = spec.partition(":")
            lo, hi = (float(t) for t in rng.split(".."))
            step = float(step) if step else 1.0
            if step <= 0 or hi < lo:
                raise ValueError
            n = int(math.floor((hi - lo) / step + 1e-9))
            vals = [lo + i * step for i in range(n + 1)]
        else:
            vals = [float(t) for t in spec.split(",") if t.strip()]
    except ValueError:
        raise MalformedFormError(f"cannot parse B specification {spec!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise MalformedFormError("B values must be positive")
    return [int(v) if v == int(v) else v for v in vals]


def load_forms(args) -> list:
    if args.form_file:
        try:
            return read_form_file(args.form_file, args.divide_content)
        except OSError as exc:
            raise MalformedFormError(str(exc)) from None
    if args.form is None:
        raise MalformedFormError("give --form or --form-file")
    return [parse_form(args.form, args.divide_content)]


def _mat(m):
    return [list(r) for r in m]


def decomposition_json(q, search_cap: int) -> dict:
    st = stats(q)
    dec = decompose(q)
    classes = []
    for k, c in enumerate(dec.classes):
        sv = sieve_setup(c)
        z1, z2, complete = minimal_zeros(q, c.reduced, search_cap)
        classes.append({
            "index": k + 1,
            "matrix": _mat(c.matrix),
            "hnf": _mat(c.hnf),
            "D": c.multiplier,
            "det": c.det_m,
            "z1": list(z1) if z1 else None,
            "z2": list(z2) if z2 else None,
            "minimal_zeros_complete": complete,
            "kappa": sv.kappa,
            "delta1": sv.delta1,
            "delta2": sv.delta2,
            "primes": {str(pc.p): pc.tag for pc in sv.primes},
        })
    return {"form": list(q.coeffs), "delta": st.delta, "norm_sq": st.norm_sq,
            "rho": st.aspect_ratio, "K": dec.k_count, "classes": classes}


def _prediction(q, dec, height, scale):
    w = Weight(WEIGHT_FOR[height], scale if height == W0 else 1.0)
    sig = sigma_infinity_2d(q, dec.classes[0], w).value
    return predict_total(q, dec, sig), sig


def count_rows(q, Bs, height, scale, with_oracle, oracle_cap, workers):
    dec = decompose(q)
    pred, _ = _prediction(q, dec, height, scale)
    rows = []
    oracle = None
    if with_oracle:
        top = max(Bs) * (scale if height == W0 else 1)
        if top > oracle_cap:
            raise MalformedFormError("oracle cap is below the largest B")
        oracle = brute_force_zeros(q, int(math.floor(top)), cap=oracle_cap, workers=workers)
    for B in Bs:
        per = [count_class(q, c, B, height, scale) for c in dec.classes]
        raw = sum(per)
        predicted = pred["slope"] * B
        if oracle is not None:
            if height == SUP:
                ref = sum(1 for x in oracle if max(map(abs, x)) <= B)
            elif height == L2:
                ref = sum(1 for x in oracle if la.norm_sq(x) <= B * B)
            else:
                r2 = (B * scale) ** 2
                ref = sum(math.exp(-1 / (1 - la.norm_sq(x) / r2)) for x in oracle
                          if la.norm_sq(x) < r2)
            if abs(ref - raw) > 1e-9 * max(1.0, abs(ref)):
                raise OracleMismatchError(f"B={B}: counted {raw}, oracle {ref}")
        rows.append({"form": str(q), "B": B, "raw_count": raw, "point_count": raw / 2,
                     "per_class": per, "predicted": predicted,
                     "ratio": raw / predicted if predicted else float("nan")})
    return rows


def predict_json(q, Bs, height, scale, T_schedule) -> dict:
    dec = decompose(q)
    pred, sig = _prediction(q, dec, height, scale)
    sig2 = [sigma_infinity_2d(q, c, Weight(WEIGHT_FOR[height], scale if height == W0 else 1.0))
            for c in dec.classes]
    smooth = [sigma_infinity_2d(q, c, Weight(SMOOTH, 1.0)) for c in dec.classes]
    s3 = sigma_infinity_3d(q, Weight(SMOOTH, 1.0), T_schedule)
    diag = eigen_diagnostics(q, sigma_w0=smooth[0].value, sigma_w=sig)
    return {
        "form": list(q.coeffs),
        "height": height,
        "sigma_2d": [s.value for s in sig2],
        "sigma_2d_est_errors": [s.est_error for s in sig2],
        "sigma_w0_2d": [s.value for s in smooth],
        "sigma_w0_3d": s3.value,
        "sigma_w0_3d_est_error": s3.est_error,
        "singular_series": pred["singular_series"],
        "slope": pred["slope"],
        "per_class_slope": pred["per_class"],
        "psi": {str(B): psi(q, smooth[0].value, sig, B) for B in Bs},
        "eigen": diag,
    }


def verify_json(q, bound, Bs) -> dict:
    dec = decompose(q)
    rep = verify_decomposition(dec, bound)
    sieve = []
    for k, c in enumerate(dec.classes):
        sv = sieve_setup(c)
        for B in Bs:
            r = sieve_identity_check(q, c, B, sieve=sv)
            r["class"] = k + 1
            sieve.append(r)
    ok = rep["ok"] and all(r["ok"] for r in sieve)
    return {"form": list(q.coeffs), "ok": ok, "decomposition": rep, "sieve": sieve}


def paper_repro_report(gnuplot: str = None) -> tuple:
    from .reference import figure_table, onset_table, run_checks
    checks = run_checks()
    lines = []
    for name, ok, detail in checks:
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    lines.append("")
    lines.append("figure data: B, N, N/2, plotted")
    table = figure_table()
    for row in table:
        lines.append("  %6d %6d %6d %6d" % row)
    lines.append("")
    lines.append("per-class onset: B, C1, C2")
    for row in onset_table():
        lines.append("  %6d %6d %6d" % row)
    if gnuplot:
        with open(gnuplot, "w") as fh:
            fh.write(gnuplot_script(table))
    failed = [name for name, ok, _ in checks if not ok]
    return "\n".join(lines) + "\n", failed


def gnuplot_script(table) -> str:
    data = "\n".join(f"{b / 1000:g} {half} {plotted}" for b, _, half, plotted in table)
    return ("set xlabel 'B/1000'\nset ylabel 'points'\n"
            "plot '-' using 1:2 with linespoints title 'computed N/2', "
            "'-' using 1:3 with points title 'plotted'\n"
            f"{data}\ne\n{data}\ne\n")


def _dump(obj, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    rows = obj if isinstance(obj, list) else [obj]
    buf = io.StringIO()
    flat = []
    for r in rows:
        r = dict(r)
        per = r.pop("per_class", None)
        if per is not None:
            for i, v in enumerate(per):
                r[f"class_{i + 1}"] = v
        flat.append(r)
    keys = []
    for r in flat:
        for k in r:
            if k not in keys:
                keys.append(k)
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in flat:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v)
                    for k, v in r.items()})
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conic-zeros",
                                description="Zeros of isotropic ternary quadratic forms.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, B_default=None):
        sp.add_argument("--form", help='six integers "q11 q12 q13 q22 q23 q33"')
        sp.add_argument("--form-file", help="file with one form per line, # comments")
        sp.add_argument("--divide-content", action="store_true",
                        help="divide out the coefficient gcd instead of rejecting it")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--threads", type=int, default=None)
        if B_default is not None:
            sp.add_argument("--B", default=B_default, help="a..b:s, a,b,c or a single value")
            sp.add_argument("--height", choices=(SUP, L2, W0), default=SUP)
            sp.add_argument("--scale", type=float, default=1.0, help="smooth weight scale")

    sp = sub.add_parser("decompose", help="class matrices, multipliers, minimal zeros, sieve data")
    common(sp)
    sp.add_argument("--search-cap", type=int, default=10 ** 7)

    sp = sub.add_parser("count", help="counts of zeros up to height B")
    common(sp, "1000")
    sp.add_argument("--with-oracle", action="store_true")
    sp.add_argument("--oracle-cap", type=int, default=10000)

    sp = sub.add_parser("predict", help="real density, singular series and slope")
    common(sp, "1000")
    sp.add_argument("--T-schedule", default=None, help="comma list of T values")

    sp = sub.add_parser("verify", help="exact checks of the decomposition and the sieve")
    common(sp, "20,100")
    sp.add_argument("--bound", type=int, default=50)

    sp = sub.add_parser("paper-repro", help="reproduce the worked example q0")
    sp.add_argument("--out")
    sp.add_argument("--gnuplot", help="also write a gnuplot script for the figure data")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_text = ""
    status = 0
    try:
        if args.command == "paper-repro":
            out_text, failed = paper_repro_report(args.gnuplot)
            if failed:
                out_text += "failed checks: " + ", ".join(failed) + "\n"
                status = 1
        else:
            workers = args.threads or default_workers()
            forms = load_forms(args)
            if args.command == "decompose":
                res = [decomposition_json(q, args.search_cap) for q in forms]
                obj = res if len(res) > 1 else res[0]
                if args.format == "csv":
                    obj = [dict(form=str(q), **{k: v for k, v in c.items()})
                           for q, r in zip(forms, res) for c in r["classes"]]
            elif args.command == "count":
                Bs = parse_b_values(args.B)
                obj = [r for q in forms for r in count_rows(q, Bs, args.height, args.scale,
                                                            args.with_oracle, args.oracle_cap,
                                                            workers)]
            elif args.command == "predict":
                Bs = parse_b_values(args.B)
                Ts = DEFAULT_T if not args.T_schedule else \
                    tuple(float(t) for t in args.T_schedule.split(","))
                res = [predict_json(q, Bs, args.height, args.scale, Ts) for q in forms]
                obj = res if len(res) > 1 else res[0]
            else:
                Bs = parse_b_values(args.B)
                res = [verify_json(q, args.bound, Bs) for q in forms]
                obj = res if len(res) > 1 else res[0]
                if not all(r["ok"] for r in res):
                    status = OracleMismatchError.exit_code
            out_text = _dump(obj, args.format)
    except ConicZerosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(out_text)
    else:
        sys.stdout.write(out_text)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
