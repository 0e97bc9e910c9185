"""Command line interface: compute, predict and verify."""

from __future__ import annotations

import csv
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from .report import FORMATS, Report, RunConfig, compare_prediction, render, render_reports, run_compute, run_predict

OUT_ENV = "BIANCHI_COHOMOLOGY_OUT"
EXT = {"markdown": "md", "csv": "csv", "json": "json"}

# the worked-example levels checked by `verify` when no level is given
DEFAULT_VERIFY = (
    (2, "1+sqrt(-2)"),
    (2, "2"),
    (2, "5"),
    (2, "sqrt(-2)"),
    (2, "3+2*sqrt(-2)"),
    (11, "2"),
    (11, "(-1+sqrt(-11))/2"),
)


class ModuleError(click.ClickException):
    exit_code = 1


def _tagged(exc: Exception) -> ModuleError:
    module = type(exc).__module__.rsplit(".", 1)[-1]
    return ModuleError(f"[{module}] {type(exc).__name__}: {exc}")


def _parse_ells(text: str) -> tuple[int, ...]:
    try:
        ells = tuple(sorted({int(x) for x in text.split(",") if x.strip()}))
    except ValueError:
        raise click.BadParameter("expected a comma-separated list such as 2,3") from None
    if not ells or any(e not in (2, 3) for e in ells):
        raise click.BadParameter("only l = 2 and l = 3 are supported")
    return ells


def _read_batch(path: str) -> list[tuple[int, str]]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].strip().startswith("#"):
                continue
            if rec[0].strip().lower() == "m":
                continue
            rows.append((int(rec[0]), ",".join(rec[1:]).strip()))
    return rows


def _targets(m, level, batch) -> list[tuple[int, str]]:
    if batch:
        return _read_batch(batch)
    if m is None or level is None:
        raise click.UsageError("give --m and --level, or --batch")
    return [(m, level)]


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_") or "level"


def _emit(reports: list[Report], fmt: str, out_dir: str | None, stem: str) -> None:
    text = render_reports(reports, fmt)
    click.echo(text, nl=False)
    if out_dir:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{stem}.{EXT[fmt]}").write_text(text)


def _compute_one(args) -> Report:
    return run_compute(RunConfig(*args))


def _run_many(fn, jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


fmt_option = click.option("--format", "fmt", type=click.Choice(FORMATS), default="markdown", show_default=True)
out_option = click.option(
    "--out-dir", envvar=OUT_ENV, type=click.Path(file_okay=False), default=None,
    help=f"Also write the output here (default from ${OUT_ENV}).",
)


@click.group()
def main():
    """Mod-2 cohomology of congruence subgroups Gamma_0(eta) of Bianchi groups."""


@main.command()
@click.option("--m", type=int, help="Square-free m of Q(sqrt(-m)); 2, 7 or 11 for geometry.")
@click.option("--level", help='Level ideal, e.g. "5", "sqrt(-2)", "[2, 1+w]".')
@click.option("--ell", default="2,3", show_default=True, help="Torsion primes to census.")
@fmt_option
@click.option("--dump-domain", type=click.Path(dir_okay=False), default=None, help="Write the Ford domain as JSON.")
@click.option("--dump-complex", type=click.Path(dir_okay=False), default=None, help="Write the quotient complex as JSON.")
@click.option("--budget", type=int, default=4096, show_default=True, help="Norm budget for the sphere search.")
@click.option("--overrides", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON file of d_2 rank overrides.")
@click.option("--batch", type=click.Path(exists=True, dir_okay=False), default=None, help="CSV of m,level rows.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes for batch mode.")
@out_option
def compute(m, level, ell, fmt, dump_domain, dump_complex, budget, overrides, batch, jobs, out_dir):
    """Run the full pipeline for one level or a batch."""
    ells = _parse_ells(ell)
    targets = _targets(m, level, batch)
    if batch and (dump_domain or dump_complex):
        raise click.UsageError("--dump-domain and --dump-complex need a single level")
    jobs_args = [(mm, lv, ells, fmt, dump_domain, dump_complex, budget, overrides) for mm, lv in targets]
    try:
        reports = _run_many(_compute_one, jobs_args, jobs)
    except Exception as exc:  # noqa: BLE001
        raise _tagged(exc) from exc
    stem = "compute-batch" if batch else f"compute-m{m}-{_slug(level)}"
    _emit(reports, fmt, out_dir, stem)
    sys.exit(max(r.exit_code for r in reports))


def _predict_one(args) -> Report:
    return run_predict(*args)


@main.command()
@click.option("--m", type=int)
@click.option("--level")
@fmt_option
@click.option("--batch", type=click.Path(exists=True, dir_okay=False), default=None, help="CSV of m,level rows.")
@click.option("--jobs", type=int, default=1, show_default=True)
@out_option
def predict(m, level, fmt, batch, jobs, out_dir):
    """Predict the reduced 2-torsion census from arithmetic alone."""
    targets = _targets(m, level, batch)
    try:
        reports = _run_many(_predict_one, targets, jobs)
    except Exception as exc:  # noqa: BLE001
        raise _tagged(exc) from exc
    stem = "predict-batch" if batch else f"predict-m{m}-{_slug(level)}"
    _emit(reports, fmt, out_dir, stem)
    sys.exit(max(r.exit_code for r in reports))


@main.command()
@click.option("--m", type=int)
@click.option("--level")
@fmt_option
@click.option("--batch", type=click.Path(exists=True, dir_okay=False), default=None, help="CSV of m,level rows.")
@click.option("--budget", type=int, default=4096, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@out_option
def verify(m, level, fmt, batch, budget, jobs, out_dir):
    """Compare predicted and geometric 2-torsion censuses; exit 1 on any disagreement."""
    if batch or (m is not None and level is not None):
        targets = _targets(m, level, batch)
    else:
        targets = list(DEFAULT_VERIFY)
    jobs_args = [(mm, lv, (2,), "json", None, None, budget, None) for mm, lv in targets]
    try:
        reports = _run_many(_compute_one, jobs_args, jobs)
    except Exception as exc:  # noqa: BLE001
        raise _tagged(exc) from exc
    rows = [compare_prediction(r) for r in reports]
    if fmt == "json":
        text = json.dumps(rows, sort_keys=True, indent=2) + "\n"
    else:
        cols = ("m", "level", "geometry", "predicted", "status")
        body = []
        for row in rows:
            pred = row.get("predicted")
            ptxt = " ".join(f"{k}={v}" for k, v in pred.items()) if pred else "-"
            body.append([str(row["m"]), row["level"], str(row["geometry"]), ptxt, row["status"]])
        text = render(body, cols, fmt)
    click.echo(text, nl=False)
    if out_dir:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"verify.{EXT[fmt]}").write_text(text)
    sys.exit(1 if any(r["status"] == "disagree" for r in rows) else 0)


if __name__ == "__main__":
    main()
