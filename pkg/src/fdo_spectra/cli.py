"""``fdo-spectra <command> --config <path> [--output-dir DIR] [--emit-svg]``.

Exit codes: 0 success, 1 usage or configuration error, 2 resolution failure,
3 certificate failure, 4 numerical contract failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import COMMANDS, ConfigError, RunConfig, default_config, parse_config
from .errors import (
    BoundViolation,
    CertificateError,
    NonIntegrableError,
    NumericalError,
    QuadratureError,
    ResolutionError,
)
from .phasespace import LeadingTerm, PhaseSpaceQuery, cosh_integral, quadrant_integral
from .plots import line_plot
from .schedule import ratio_series, sandwich_report
from .spectral import assemble, counting_function, eigenvalues, resolution_check, riesz_mean
from .verification import run_suite

log = logging.getLogger("fdo_spectra")

EXIT_OK, EXIT_USAGE, EXIT_RESOLUTION, EXIT_CERTIFICATE, EXIT_NUMERICAL = range(5)


class ContractFailure(Exception):
    """An asserted invariant failed; outputs are still written."""


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _threads():
    try:
        n = int(os.environ.get("FDO_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _sweep(fn, items):
    """Map over the lambda sweep in parallel, results in input order."""
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        return list(pool.map(fn, items))


def _resolved(cfg: RunConfig):
    diag = resolution_check(cfg.grid, cfg.spec, max(cfg.lambdas))
    if not diag.ok:
        raise ResolutionError("grid does not resolve max(lambdas)", diag.as_dict())


# ---------------------------------------------------------------------------
# commands: each returns {filename: text} plus an optional failure message
# ---------------------------------------------------------------------------

def cmd_spectrum(cfg):
    _resolved(cfg)
    spec_res = eigenvalues(assemble(cfg.grid, cfg.spec))
    counts = counting_function(spec_res, list(cfg.lambdas))
    rows = [(lam, int(n), riesz_mean(spec_res, lam)) for lam, n in zip(cfg.lambdas, counts)]
    files = {
        "spectrum.csv": _csv_text(["lambda", "count", "riesz_mean"], rows),
        "eigenvalues.csv": _csv_text(["index", "eigenvalue"],
                                     [(i, float(v)) for i, v in enumerate(spec_res.eigenvalues)]),
    }
    svg = {"spectrum.svg": line_plot(
        {"N(lambda)": (list(spec_res.eigenvalues), list(range(1, len(spec_res) + 1)))},
        title="eigenvalue counting function", xlabel="lambda", ylabel="N", logx=True, logy=True)}
    return files, svg, None


def cmd_bounds(cfg):
    _resolved(cfg)
    spec_res = eigenvalues(assemble(cfg.grid, cfg.spec))

    def one(lam):
        return sandwich_report(cfg.spec, [lam], cfg.grid, spectrum=spec_res,
                               a_override=cfg.a_override, epsilon_override=cfg.epsilon_override)[0]

    reps = _sweep(one, cfg.lambdas)
    rows = [(r.lam, r.lower, r.riesz, r.upper, r.leading, *r.ratios, r.holds()) for r in reps]
    header = ["lambda", "lower", "riesz", "upper", "leading", "riesz_ratio", "lower_ratio",
              "upper_ratio", "holds"]
    lams = [r.lam for r in reps]
    svg = {"bounds.svg": line_plot(
        {"lower": (lams, [r.lower for r in reps]), "riesz": (lams, [r.riesz for r in reps]),
         "upper": (lams, [r.upper for r in reps])},
        title="Riesz mean sandwich", xlabel="lambda", ylabel="value", logx=True, logy=True)}
    return {"bounds.csv": _csv_text(header, rows)}, svg, None


def cmd_phasespace(cfg):
    lead = LeadingTerm.riesz(cfg.spec)

    def one(lam):
        q = PhaseSpaceQuery(lam, 1.0, cfg.spec)
        quad_c, quad_half = quadrant_integral(q), quadrant_integral(PhaseSpaceQuery(lam, 0.5, cfg.spec))
        ch = cosh_integral(q)
        lt = lead(lam) if lam > math.e else math.nan
        ok = quad_c * (1 - 1e-9) <= ch <= quad_half * (1 + 1e-9)
        return (lam, 1.0, quad_c, ch, quad_half, lt, quad_c / lt, ok)

    rows = _sweep(one, cfg.lambdas)
    header = ["lambda", "C", "quadrant_integral", "cosh_integral", "quadrant_integral_half_C",
              "leading_term", "ratio", "cosh_sandwich"]
    failure = None if all(r[-1] for r in rows) else "cosh sandwich violated"
    lams = [r[0] for r in rows]
    svg = {"phasespace.svg": line_plot(
        {"quadrant": (lams, [r[2] for r in rows]), "cosh": (lams, [r[3] for r in rows]),
         "leading": (lams, [r[5] for r in rows])},
        title="phase-space integrals", xlabel="lambda", ylabel="value", logx=True, logy=True)}
    return {"phasespace.csv": _csv_text(header, rows)}, svg, failure


def cmd_verify(cfg):
    spec_res = eigenvalues(assemble(cfg.grid, cfg.spec))
    checks = run_suite(spec_res, cfg.lambdas)
    rows = [c.row() for c in checks]
    bad = [c.name for c in checks if not c.passed]
    failure = f"{len(bad)} checks failed: {', '.join(bad)}" if bad else None
    return {"verify.csv": _csv_text(["check_name", "value", "threshold", "pass"], rows)}, {}, failure


def cmd_asymptotics(cfg):
    measured = _sweep(lambda lam: quadrant_integral(PhaseSpaceQuery(lam, 1.0, cfg.spec)), cfg.lambdas)
    series = ratio_series(list(zip(cfg.lambdas, measured)), LeadingTerm.riesz(cfg.spec))
    rows = [(*r, abs(r[3] - 1.0) <= 3.0 / math.log(r[0])) for r in series.rows()]
    header = ["lambda", "measured", "predicted", "ratio", "delta", "within_window"]
    failure = None
    if cfg.spec.beta == 0 and not all(r[-1] for r in rows if r[0] >= 1e3):
        failure = "leading-term ratio outside [1 - 3/log lam, 1 + 3/log lam]"
    svg = {"asymptotics.svg": line_plot({"ratio": (list(series.lambdas), list(series.ratios))},
                                        title="measured / leading term", xlabel="lambda",
                                        ylabel="ratio", logx=True)}
    return {"asymptotics.csv": _csv_text(header, rows)}, svg, failure


DISPATCH = {
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "phasespace": cmd_phasespace,
    "verify": cmd_verify,
    "asymptotics": cmd_asymptotics,
}


def run(cfg: RunConfig, command=None) -> int:
    """Execute one command; returns the process exit status."""
    command = command or cfg.command
    if command not in DISPATCH:
        log.error("unknown command %r", command)
        return EXIT_USAGE
    try:
        files, svgs, failure = DISPATCH[command](cfg)
    except ResolutionError as exc:
        log.error("resolution failure: %s %s", exc, json.dumps(exc.diagnostics, sort_keys=True))
        return EXIT_RESOLUTION
    except (CertificateError, NonIntegrableError) as exc:
        log.error("certificate failure: %s", exc)
        return EXIT_CERTIFICATE
    except (NumericalError, QuadratureError, BoundViolation) as exc:
        log.error("numerical contract failure: %s", exc)
        return EXIT_NUMERICAL
    except ValueError as exc:
        log.error("invalid request: %s", exc)
        return EXIT_USAGE
    if cfg.emit_svg:
        files = {**files, **svgs}
    for name, text in files.items():
        _write_atomic(cfg.output_dir / name, text)
    if failure:
        log.error("%s", failure)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="fdo-spectra", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", type=Path, help="JSON run configuration (defaults if omitted)")
    ap.add_argument("--output-dir", type=Path, help="overrides output_dir from the config")
    ap.add_argument("--emit-svg", action="store_true", help="also write SVG plots")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = parse_config(args.config.read_bytes()) if args.config else default_config()
    except (OSError, ConfigError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    if cfg.command is not None and cfg.command != args.command:
        log.error("config command %r does not match %r", cfg.command, args.command)
        return EXIT_USAGE
    updates = {}
    if args.output_dir is not None:
        updates["output_dir"] = args.output_dir
    if args.emit_svg:
        updates["emit_svg"] = True
    if updates:
        cfg = RunConfig(**{**cfg.__dict__, **updates})
    return run(cfg, args.command)


if __name__ == "__main__":
    sys.exit(main())
