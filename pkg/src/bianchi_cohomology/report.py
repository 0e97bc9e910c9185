"""End-to-end pipeline runs and their serializable reports."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .arith import discriminant, format_level, gamma0_index, parse_level
from .cohomology import (
    d2_ranks,
    dimension_profile,
    e2_page,
    find_override,
    load_overrides,
)
from .complex import build_quotient, complex_to_json, homology, presentation_and_abelianization
from .ford import build_domain, domain_to_json
from .predictor import DiscriminantExcluded, predict
from .torsion import UnknownComponent, census, extract, reduce

FORMATS = ("markdown", "csv", "json")
TABLE_COLUMNS = ("Delta", "m", "level", "components", "b_1", "b^1", "r", "c", "H1", "H2", "H3", "H4", "H5")


@dataclass(frozen=True)
class RunConfig:
    m: int
    level: str
    ells: tuple[int, ...] = (2, 3)
    fmt: str = "markdown"
    dump_domain: str | None = None
    dump_complex: str | None = None
    budget: int | None = 4096
    overrides: str | None = None

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if any(ell not in (2, 3) for ell in self.ells):
            raise ValueError("ell must be 2 or 3")


@dataclass
class Report:
    command: str
    inputs: dict
    results: dict
    timing: float = 0.0
    exit_code: int = 0

    def to_json(self, with_timing: bool = True) -> dict:
        out = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "exit_code": self.exit_code,
        }
        if with_timing:
            out["timing"] = round(self.timing, 3)
        return out

    def dumps(self, with_timing: bool = True) -> str:
        return json.dumps(self.to_json(with_timing), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict | str) -> Report:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            data["command"], data["inputs"], data["results"], data.get("timing", 0.0), data.get("exit_code", 0)
        )


def census_json(cen) -> dict:
    return {
        "components": cen.symbols(),
        "multiset": list(cen.multiset),
        "counts": cen.counts(),
        "k": cen.k,
        "m": cen.m,
        "n": cen.n,
        "v": cen.v,
        "chi": cen.chi,
        "c": cen.c,
        "c_reduced": cen.extra.get("c_reduced"),
    }


def _graph_json(graph) -> dict:
    return {
        "vertices": {str(v): t for v, t in sorted(graph.vertices.items())},
        "edges": {str(e): list(x) for e, x in sorted(graph.edges.items())},
    }


def run_compute(config: RunConfig) -> Report:
    """Ford domain, quotient complex, torsion census, d_2 ranks and the cohomology profile."""
    t0 = time.perf_counter()
    m = config.m
    eta = parse_level(config.level, m)
    domain = build_domain(eta, config.budget)
    if config.dump_domain:
        Path(config.dump_domain).write_text(json.dumps(domain_to_json(domain), sort_keys=True, indent=1))
    cx = build_quotient(domain)
    if config.dump_complex:
        Path(config.dump_complex).write_text(json.dumps(complex_to_json(cx), sort_keys=True, indent=1))
    H = homology(cx)
    sl = presentation_and_abelianization(cx)
    psl = presentation_and_abelianization(cx, projective=True)
    V, E, F = cx.counts()
    res: dict = {
        "field": {"m": m, "discriminant": discriminant(m)},
        "level": format_level(eta),
        "level_norm": eta.norm(),
        "index": gamma0_index(eta),
        "domain": {
            "spheres": len(domain.spheres),
            "vertices": len(domain.vertices),
            "cusps": len(domain.cusps),
            "faces": len(domain.faces),
        },
        "complex": {"counts": [V, E, F], "euler_characteristic": cx.euler_characteristic(), "cusp_cells": cx.cusp_classes},
        "homology": {
            "H0": str(H.H0),
            "H1": str(H.H1),
            "H2": str(H.H2),
            "beta1": H.beta1_mod2,
            "beta2": H.beta2_mod2,
            "betti1_rational": H.betti1_rational,
        },
        "abelianization": {"SL": str(sl.abelianization), "PSL": str(psl.abelianization), "hom_to_f2": sl.hom_to_f2},
        "torsion_census": {},
        "notes": [],
    }
    censuses = {}
    for ell in config.ells:
        graph = extract(cx, ell)
        try:
            cen = census(graph, cx)
        except UnknownComponent:
            res["torsion_census"][str(ell)] = {"components": "unclassified", "graph": _graph_json(reduce(graph))}
            res["notes"].append(f"l={ell}: component outside the four congruence-subgroup types")
            continue
        censuses[ell] = cen
        res["torsion_census"][str(ell)] = census_json(cen)
        if cen.extra.get("c_reduced") not in (None, cen.c):
            res["notes"].append(f"l={ell}: c differs between unreduced ({cen.c}) and reduced graph")
    try:
        res["prediction"] = predict(m, eta).to_json()
    except DiscriminantExcluded as exc:
        res["prediction"] = None
        res["notes"].append(f"predictor: {exc}")

    code = 0
    cen2 = censuses.get(2)
    if cen2 is None:
        res["d2_ranks"] = res["e2_page"] = res["profile"] = None
        if 2 in config.ells:
            res["notes"].append("cohomology profile needs a classified 2-torsion census")
    else:
        records = load_overrides(config.overrides)
        if config.overrides is not None:
            records += load_overrides()
        ov = find_override(records, m, eta)
        ranks = d2_ranks(cen2, H.beta1_mod2, sl.hom_to_f2, ov)
        page = e2_page(cen2, H.beta1_mod2, H.beta2_mod2)
        prof = dimension_profile(cen2, H.beta1_mod2, H.beta2_mod2, ranks)
        res["d2_ranks"] = ranks.to_json()
        res["e2_page"] = {"rows": [list(r) for r in page.rows()], "a1": page.a1, "a2": page.a2, "a3": page.a3}
        res["profile"] = {"case": prof.case, "H": [str(d) for d in prof.values()], "symbolic": prof.symbolic}
        if prof.symbolic:
            code = 2
    inputs = {"m": m, "level": config.level, "ell": list(config.ells), "budget": config.budget}
    return Report("compute", inputs, res, time.perf_counter() - t0, code)


def run_predict(m: int, level: str) -> Report:
    t0 = time.perf_counter()
    eta = parse_level(level, m)
    p = predict(m, eta)
    res = {"field": {"m": m, "discriminant": discriminant(m)}, "prediction": p.to_json()}
    code = 0 if p.multiset() is not None else 2
    return Report("predict", {"m": m, "level": level}, res, time.perf_counter() - t0, code)


def compare_prediction(report: Report) -> dict:
    """Agreement of the l=2 geometric census with the predictor on the same level."""
    r = report.results
    geo = r["torsion_census"].get("2", {})
    pred = r.get("prediction")
    row = {"m": report.inputs["m"], "level": report.inputs["level"], "geometry": geo.get("components"), "status": "agree"}
    if pred is None or "counts" not in geo:
        row["status"] = "skipped"
        return row
    keys = {"i": "iota_count", "theta": "theta_count", "db": "dumbbell_count"}
    diffs = []
    for tag, key in keys.items():
        want = pred[key]
        if want == "unknown":
            row["status"] = "unknown" if row["status"] == "agree" else row["status"]
            continue
        if geo["counts"][tag] != want:
            diffs.append(f"{tag}: geometry {geo['counts'][tag]} vs predicted {want}")
    row["predicted"] = {tag: pred[key] for tag, key in keys.items()}
    if diffs:
        row["status"] = "disagree"
        row["diffs"] = diffs
    return row


# ---------------------------------------------------------------- formatting


def table_row(report: Report) -> list[str]:
    r = report.results
    cen = r["torsion_census"].get("2", {})
    prof = r.get("profile") or {}
    ranks = r.get("d2_ranks") or {}
    r01 = (ranks.get("r01") or {}).get("value")
    hs = prof.get("H", ["?"] * 5)
    return [
        str(r["field"]["discriminant"]),
        str(r["field"]["m"]),
        r["level"],
        cen.get("components", "?"),
        str(r["homology"]["betti1_rational"]),
        str(r["homology"]["beta1"]),
        "r" if r01 is None else str(r01),
        str(cen.get("c", "?")),
        *hs,
    ]


def predict_row(report: Report) -> list[str]:
    p = report.results["prediction"]
    return [
        str(report.results["field"]["discriminant"]),
        str(p["m"]),
        p["level"],
        str(p["iota_count"]),
        str(p["theta_count"]),
        str(p["dumbbell_count"]),
        "; ".join(p["notes"]),
    ]


PREDICT_COLUMNS = ("Delta", "m", "level", "iota", "theta", "dumbbell", "clauses")


def render(rows: list[list[str]], columns, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    lines += ["| " + " | ".join(row) + " |" for row in rows]
    return "\n".join(lines) + "\n"


def render_reports(reports: list[Report], fmt: str) -> str:
    if fmt == "json":
        payload = [rep.to_json() for rep in reports]
        return json.dumps(payload[0] if len(payload) == 1 else payload, sort_keys=True, indent=2) + "\n"
    if not reports:
        return ""
    if reports[0].command == "predict":
        return render([predict_row(r) for r in reports], PREDICT_COLUMNS, fmt)
    return render([table_row(r) for r in reports], TABLE_COLUMNS, fmt)

