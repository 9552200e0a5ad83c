import pandas as pd

from src.features.rep_algebra.irrep_sum import IrrepSum
from src.features.rep_algebra.partition import format_parts
from src.features.spectral_sequences.leray import circle_leray_page, circle_link_ih
from src.features.taut_ring.tautological import pairing_check, taut_graded_dims
from src.features.decomposition.decomposition_engine import GenusReport, StratumStep
from src.features.decomposition.link_store import LinkStore
from src.features.decomposition.models import BettiValue, Stratification

RULE = "=" * 60
NO_NEW = "no new local systems"
CSV_COLUMNS = ["section", "stratum", "degree", "item", "value"]


def _frame_text(df: pd.DataFrame) -> str:
    if df.empty:
        return "(empty)"
    return df.to_string()


def _heading(title: str) -> list[str]:
    return ["", title, "-" * len(title)]


def _cell(value: IrrepSum | None) -> str:
    return "?" if value is None else str(value)


# ============================================================================
# Tables
# ============================================================================

def stratification_frame(strat: Stratification) -> pd.DataFrame:
    rows = [
        {
            "stratum": f"A_{k}",
            "dim A_k": strat.stratum_dims[k],
            "codim": strat.codim(k),
            "fiber dim": strat.fiber_dim(k),
            "max shift": strat.max_shift(k),
        }
        for k in reversed(range(strat.genus))
    ]
    return pd.DataFrame(rows, columns=["stratum", "dim A_k", "codim", "fiber dim", "max shift"]).set_index("stratum")


def contribution_frame(step: StratumStep, strat: Stratification) -> pd.DataFrame:
    """Degrees of H^*(F_k) as rows: one column per source, then the fiber and what is new."""
    sources = step.prediction.sources()
    labels = {}
    for source in sources:
        stratum, degree, coefficient = source
        if degree is None:
            labels[source] = f"from A_{stratum}"
        else:
            labels[source] = f"from A_{stratum} j={degree} {format_parts(coefficient)}"

    rows = []
    for d in range(2 * strat.fiber_dim(step.stratum) + 1):
        row = {"degree": d}
        contributions = step.prediction.row(d).contributions
        for source in sources:
            pieces = [
                c.label for c in contributions
                if (c.source_stratum, c.source_degree, c.coefficient) == source
            ]
            row[labels[source]] = " + ".join(pieces) if pieces else "0"
        row["fiber"] = str(step.fiber.at(d))
        row["new"] = str(step.inference.new_at(d))
        rows.append(row)
    columns = ["degree"] + [labels[s] for s in sources] + ["fiber", "new"]
    return pd.DataFrame(rows, columns=columns).set_index("degree")


def link_frame(links: LinkStore) -> pd.DataFrame:
    families = links.families()
    width = max((links.middle(k, r) for k, r, _ in families), default=0)
    rows = []
    for family in families:
        k, r, _ = family
        values = links.row(family)
        row = {"link": LinkStore.family_label(family), "dim_R N": links.link_dim(k, r)}
        for q in range(width + 1):
            row[f"q={q}"] = _cell(values[q]) if q < len(values) else ""
        rows.append(row)
    columns = ["link", "dim_R N"] + [f"q={q}" for q in range(width + 1)]
    return pd.DataFrame(rows, columns=columns).set_index("link")


def _render_cell(value: BettiValue | None) -> str:
    return "" if value is None else value.render()


def genus_frame(report: GenusReport) -> pd.DataFrame:
    """Toroidal row, tautological row, one row per summand, and their sum, by total degree."""
    assembly = report.assembly
    top = len(assembly.taut) - 1
    degrees = list(range(top + 1))

    rows = {f"h({assembly.toroidal.label})": [assembly.toroidal[d].render() for d in degrees]}
    rows[f"r(Sat_{report.genus})"] = [str(v) for v in assembly.taut]
    for summand_row in assembly.rows:
        rows[summand_row.label] = [_render_cell(summand_row.cells.get(d)) for d in degrees]
    rows["Sum"] = [str(v) for v in assembly.sum_row]
    return pd.DataFrame.from_dict(rows, orient="index", columns=degrees)


def _sum_matches_top(report: GenusReport) -> bool:
    toroidal = report.assembly.toroidal
    return all(
        not toroidal[d].is_known or toroidal[d].exact == value
        for d, value in enumerate(report.assembly.sum_row)
    )


# ============================================================================
# Reports
# ============================================================================

def _text_report(report: GenusReport, emit_constraints: bool) -> str:
    g = report.genus
    assembly = report.assembly
    lines = [RULE, f"Decomposition of H*({assembly.toroidal.label}) over {report.stratification.name}", RULE]
    lines.append(f"policy: {report.policy}")

    lines += _heading("Stratification")
    lines.append(_frame_text(stratification_frame(report.stratification)))
    lines.append(f"defect: {report.defect}")

    for step in report.steps:
        lines += _heading(f"Contributions over A_{step.stratum}")
        lines.append(_frame_text(contribution_frame(step, report.stratification)))
        if not step.inference.entries:
            lines.append(f"{NO_NEW} on A_{step.stratum}")

    lines += _heading("Ledger")
    if report.ledger:
        lines.extend(entry.label for entry in report.ledger)
    else:
        lines.append(NO_NEW)

    lines += _heading("Links")
    lines.append(_frame_text(link_frame(report.links)))
    lines.append("IH^q(N) = IH^{dim_R N - q}(N) above the middle degree")
    if report.zero_forced:
        lines.append("forced to 0 by a zero right-hand side: " + ", ".join(s.label for s in report.zero_forced))

    if emit_constraints:
        lines += _heading("Constraints")
        if report.constraints:
            lines.extend(c.label for c in report.constraints)
        else:
            lines.append("none")

    lines += _heading("Decomposition")
    lines.append(assembly.decomposition_label)

    lines += _heading(f"Genus {g} table")
    lines.append(_frame_text(genus_frame(report)))
    lines.append(f"Sum equals the top row in every known degree: {'yes' if _sum_matches_top(report) else 'no'}")

    lines.append("")
    lines.append(f"IH(Sat_{g}) = {assembly.ih.render()}")
    mismatches = assembly.matches_taut()
    taut_line = " ".join(str(v) for v in assembly.taut)
    if mismatches:
        lines.append(f"R_{g} dims = {taut_line}; differs in degrees {mismatches}")
    else:
        lines.append(f"R_{g} dims = {taut_line}; IH agrees with R_{g} wherever known")

    for family, series in sorted(assembly.coefficient_series.items()):
        lines.append(f"IH({family}) = {series.render()}")

    if assembly.relations or assembly.bounds:
        lines += _heading("Relations and bounds")
        lines.extend(relation.label for relation in assembly.relations)
        lines.extend(bound.label for bound in assembly.bounds)

    if report.blowup is not None:
        lines += _heading(f"Blow-up: {report.blowup.label}")
        lines.append(f"IH({report.blowup.label}) even degrees = {' '.join(report.blowup.even_row())}")
        lines.append(f"IH({report.blowup.label}) = {report.blowup.render()}")
        if report.point_check is not None:
            lines.append(f"point stratum: {report.point_check.detail}")

    return "\n".join(lines) + "\n"


def _csv_rows(report: GenusReport) -> list[dict]:
    g = report.genus
    rows = [{"section": "defect", "stratum": "", "degree": "", "item": report.stratification.name, "value": report.defect}]
    for entry in report.ledger:
        rows.append({
            "section": "ledger", "stratum": entry.stratum, "degree": entry.fiber_degree,
            "item": str(entry.system), "value": entry.shift_label,
        })
    for family in report.links.families():
        k, r, _ = family
        for q, value in enumerate(report.links.row(family)):
            rows.append({
                "section": "link", "stratum": k, "degree": q,
                "item": LinkStore.family_label(family), "value": _cell(value),
            })
    for symbol in report.zero_forced:
        rows.append({
            "section": "zero-forced", "stratum": symbol.lower, "degree": symbol.degree,
            "item": symbol.label, "value": "0",
        })
    for constraint in report.constraints:
        rows.append({
            "section": "constraint", "stratum": constraint.stratum, "degree": constraint.degree,
            "item": " + ".join(term.label for term in constraint.left), "value": str(constraint.right),
        })
    for d, value in enumerate(report.assembly.ih.values):
        rows.append({"section": "ih", "stratum": g, "degree": d, "item": f"IH{d}(Sat_{g})", "value": value.render()})
    for relation in report.assembly.relations:
        rows.append({"section": "relation", "stratum": g, "degree": relation.degree, "item": relation.label, "value": ""})
    for bound in report.assembly.bounds:
        rows.append({"section": "bound", "stratum": g, "degree": "", "item": bound.symbol, "value": f">={bound.lower}"})
    if report.blowup is not None:
        for d, value in enumerate(report.blowup.values):
            rows.append({
                "section": "blowup", "stratum": 0, "degree": d,
                "item": report.blowup.symbol(d), "value": value.render(),
            })
    return rows


def frame_to_csv(df: pd.DataFrame, index: bool = False) -> str:
    return df.to_csv(index=index, lineterminator="\n")


def serialize_report(report: GenusReport, fmt: str = "text", emit_constraints: bool = False) -> str:
    """Deterministic text or CSV rendering of a run_genus report. CSV always carries the constraints."""
    if fmt == "csv":
        return frame_to_csv(pd.DataFrame(_csv_rows(report), columns=CSV_COLUMNS))
    return _text_report(report, emit_constraints)


# ============================================================================
# Smaller commands
# ============================================================================

def serialize_links(g: int, fmt: str = "text") -> str:
    table = circle_link_ih(g)
    df = pd.DataFrame(
        [{"q": q, f"IH^q(N_{{{g - 1},{g}}})": str(table.at(q))} for q in range(g)],
        columns=["q", f"IH^q(N_{{{g - 1},{g}}})"],
    )
    if fmt == "csv":
        return frame_to_csv(df)

    page = circle_leray_page(g)
    width = page.width
    grid = {
        f"E{n} q={q}": [str(page.cell(n, p, q)) for p in range(width + 1)]
        for n in (2, 3)
        for q in (1, 0)
    }
    lines = [f"Link of A_{g - 1} in Sat_{g} (real dimension {2 * g - 1})", _frame_text(df.set_index("q"))]
    lines += _heading("Leray page")
    lines.append(_frame_text(pd.DataFrame.from_dict(grid, orient="index", columns=list(range(width + 1)))))
    for (p, q), rank in sorted(page.d2_ranks.items()):
        lines.append(f"d2 ({p},{q}) -> ({p + 2},{q - 1}): {rank}")
    return "\n".join(lines) + "\n"


def serialize_taut(g: int, fmt: str = "text") -> str:
    dims = taut_graded_dims(g)
    report = pairing_check(g)
    df = pd.DataFrame(
        [{"degree": d.degree, "dim": d.dim, "dual dim": d.dual_dim, "match": d.match} for d in report.degrees],
        columns=["degree", "dim", "dual dim", "match"],
    )
    if fmt == "csv":
        return frame_to_csv(df)
    lines = [
        f"R_{g}: socle degree {dims.socle}, total dimension {dims.total}",
        f"even degrees: {' '.join(str(v) for v in dims.even_row())}",
        f"pairing: {'passed' if report.passed else 'FAILED'}",
    ]
    lines.extend(report.failures[:10])
    return "\n".join(lines) + "\n"


def serialize_defect(strat: Stratification, defect: int, fmt: str = "text") -> str:
    df = stratification_frame(strat)
    if fmt == "csv":
        return frame_to_csv(df, index=True)
    semi_small = " (semi-small)" if defect == 0 else ""
    return f"{_frame_text(df)}\ndefect: {defect}{semi_small}\n"
