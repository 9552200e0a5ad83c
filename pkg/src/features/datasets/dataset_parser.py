import re

from pydantic import BaseModel, ConfigDict

from src.shared.errors import DatasetError, DuplicateDegree, GenusMismatch, IHCalcError, NonMonotone, ParseError, TooManyRows
from src.features.rep_algebra.irrep_sum import IrrepSum
from src.features.rep_algebra.partition import normalize_parts
from src.features.spectral_sequences.graded_table import GradedTable
from src.features.spectral_sequences.gysin import ForcedDifferential, GysinPage
from src.features.decomposition.models import BettiWithUnknowns

SECTION_KINDS = ("fiber", "betti", "gysin", "link-seed")

# Header keys in the order they are written back
KEY_ORDER = ("name", "genus", "stratum", "dim", "ambient", "role", "space", "lower", "upper", "coeff", "status", "source")
QUOTED_KEYS = ("name", "source")

HEADER_RE = re.compile(r'^\[\s*([a-z][a-z-]*)((?:\s+[a-z_]+=(?:"[^"]*"|[^\s\]"]+))*)\s*\]$')
META_RE = re.compile(r'([a-z_]+)=(?:"([^"]*)"|([^\s\]"]+))')
DEGREE_RE = re.compile(r'^(\d+)\s*:\s*(.*?)(?:\s*;\s*weight\s+(-?\d+))?$')
BETTI_RE = re.compile(r'^(\d+)\s*:\s*(\d+|\?)$')
CELL_RE = re.compile(r'^\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*:\s*(.+)$')
DIFFERENTIAL_RE = re.compile(
    r'^differential\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*->\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*:\s*(.+)$'
)
TERM_RE = re.compile(r'^(?:(\d+)\s*\*?\s*)?(Q|V\[\s*\d+(?:\s*,\s*\d+)*\s*\])(?:\(\s*(-?\d+)\s*\))?$')


class DatasetSection(BaseModel):
    """One `[kind ...]` block of an .ihdat file: a single named dataset."""
    model_config = ConfigDict(frozen=True)

    kind: str
    meta: dict[str, str]
    table: GradedTable | None = None
    betti: BettiWithUnknowns | None = None
    gysin: GysinPage | None = None
    weights: dict[int, int] = {}

    @property
    def name(self) -> str:
        if "name" in self.meta:
            return self.meta["name"]
        if self.kind in ("fiber", "gysin"):
            return f"{self.kind} g={self.meta['genus']} k={self.meta['stratum']}"
        if self.kind == "link-seed":
            return f"link-seed N_{{{self.meta['lower']},{self.meta['upper']}}} {self.meta.get('coeff', 'Q')}"
        return f"{self.kind} {self.meta.get('space', '')}".strip()

    def int_meta(self, key: str, default: int | None = None) -> int | None:
        value = self.meta.get(key)
        return default if value is None else int(value)

    @property
    def source(self) -> str:
        return self.meta.get("source", "")

    @property
    def is_derived(self) -> bool:
        return self.meta.get("status") == "derived"


class DatasetFile(BaseModel):
    model_config = ConfigDict(frozen=True)

    sections: tuple[DatasetSection, ...] = ()

    def by_name(self) -> dict[str, DatasetSection]:
        return {section.name: section for section in self.sections}


# ============================================================================
# Expressions
# ============================================================================

def parse_partition(text: str, ambient_genus: int) -> tuple[int, ...]:
    text = text.strip()
    if text == "Q":
        return ()
    raw = [int(part) for part in text[2:-1].split(",")]
    return normalize_parts(raw, ambient_genus)


def parse_expression(text: str, ambient_genus: int, line: int | None = None) -> IrrepSum:
    """`V[2,2] + V[1,1] + 2 Q`, with optional `(t)` twists and `m*` / `m ` multiplicities."""
    text = text.strip()
    if text == "0":
        return IrrepSum.zero()
    counts: dict = {}
    for raw in text.split("+"):
        match = TERM_RE.match(raw.strip())
        if not match:
            raise ParseError(f"cannot read term '{raw.strip()}'", line=line)
        multiplicity = int(match.group(1)) if match.group(1) else 1
        twist = int(match.group(3)) if match.group(3) is not None else None
        try:
            parts = parse_partition(match.group(2), ambient_genus)
        except TooManyRows as e:
            raise GenusMismatch(e.message, line=line)
        except NonMonotone as e:
            raise ParseError(e.message, line=line)
        key = (parts, twist)
        counts[key] = counts.get(key, 0) + multiplicity
    return IrrepSum.from_counts(counts)


# ============================================================================
# Sections
# ============================================================================

class _RawSection:

    def __init__(self, kind: str, meta: dict[str, str], line: int):
        self.kind = kind
        self.meta = meta
        self.line = line
        self.body: list[tuple[int, str]] = []


def _ambient(raw: _RawSection) -> int:
    key = "upper" if raw.kind == "link-seed" else "stratum"
    value = raw.meta.get("ambient", raw.meta.get(key))
    if value is None:
        raise ParseError(f"{raw.kind} section needs '{key}' or 'ambient'", line=raw.line)
    return int(value)


def _require(raw: _RawSection, *keys: str) -> None:
    for key in keys:
        if key not in raw.meta:
            raise ParseError(f"{raw.kind} section needs '{key}'", line=raw.line)


def _build_graded(raw: _RawSection) -> tuple[GradedTable, dict[int, int]]:
    ambient = _ambient(raw)
    entries: dict[int, IrrepSum] = {}
    weights: dict[int, int] = {}
    for line, text in raw.body:
        match = DEGREE_RE.match(text)
        if not match:
            raise ParseError(f"expected 'degree: expression', got '{text}'", line=line)
        degree = int(match.group(1))
        if degree in entries:
            raise DuplicateDegree(f"degree {degree} appears twice", line=line)
        entries[degree] = parse_expression(match.group(2), ambient, line)
        if match.group(3) is not None:
            weights[degree] = int(match.group(3))
    top = raw.meta.get("dim")
    top_degree = 2 * int(top) if top is not None else None
    try:
        table = GradedTable(entries=entries, context_genus=ambient, top_degree=top_degree)
    except IHCalcError as e:
        raise ParseError(e.message, line=raw.line)
    return table, weights


def _build_betti(raw: _RawSection) -> BettiWithUnknowns:
    values: dict[int, int | None] = {}
    for line, text in raw.body:
        match = BETTI_RE.match(text)
        if not match:
            raise ParseError(f"expected 'degree: integer' or 'degree: ?', got '{text}'", line=line)
        degree = int(match.group(1))
        if degree in values:
            raise DuplicateDegree(f"degree {degree} appears twice", line=line)
        values[degree] = None if match.group(2) == "?" else int(match.group(2))
    top = max(values, default=-1)
    label = raw.meta.get("space", raw.meta.get("name", "X"))
    return BettiWithUnknowns.from_ints(label, [values.get(d, 0) for d in range(top + 1)])


def _build_gysin(raw: _RawSection) -> GysinPage:
    ambient = _ambient(raw)
    cells: dict[int, dict[int, IrrepSum]] = {}
    differentials = []
    for line, text in raw.body:
        differential = DIFFERENTIAL_RE.match(text)
        if differential:
            p, q, p2, q2 = (int(differential.group(i)) for i in range(1, 5))
            cancelled = parse_expression(differential.group(5), ambient, line)
            try:
                differentials.append(ForcedDifferential(source=(p, q), target=(p2, q2), cancelled=cancelled))
            except IHCalcError as e:
                raise ParseError(e.message, line=line)
            continue
        cell = CELL_RE.match(text)
        if not cell:
            raise ParseError(f"expected '(p,q): expression' or a differential, got '{text}'", line=line)
        p, q = int(cell.group(1)), int(cell.group(2))
        column = cells.setdefault(p, {})
        if q in column:
            raise DuplicateDegree(f"cell ({p},{q}) appears twice", line=line)
        column[q] = parse_expression(cell.group(3), ambient, line)
    columns = {p: GradedTable(entries=column, context_genus=ambient) for p, column in sorted(cells.items())}
    return GysinPage(columns=columns, context_genus=ambient, forced_differentials=tuple(differentials))


def _build(raw: _RawSection) -> DatasetSection:
    if raw.kind in ("fiber", "gysin"):
        _require(raw, "genus", "stratum")
    elif raw.kind == "betti":
        _require(raw, "name")
    elif raw.kind == "link-seed":
        _require(raw, "lower", "upper")

    if raw.kind == "betti":
        return DatasetSection(kind=raw.kind, meta=raw.meta, betti=_build_betti(raw))
    if raw.kind == "gysin":
        return DatasetSection(kind=raw.kind, meta=raw.meta, gysin=_build_gysin(raw))
    table, weights = _build_graded(raw)
    return DatasetSection(kind=raw.kind, meta=raw.meta, table=table, weights=weights)


def parse_dataset(text: str, source: str | None = None) -> DatasetFile:
    raw_sections: list[_RawSection] = []
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            header = HEADER_RE.match(line)
            if not header:
                raise ParseError(f"malformed section header '{line}'", line=number, source=source)
            kind = header.group(1)
            if kind not in SECTION_KINDS:
                raise ParseError(f"unknown section kind '{kind}'", line=number, source=source)
            meta = {key: quoted if quoted else bare for key, quoted, bare in META_RE.findall(header.group(2))}
            raw_sections.append(_RawSection(kind, meta, number))
            continue
        if not raw_sections:
            raise ParseError("content before the first section header", line=number, source=source)
        raw_sections[-1].body.append((number, line))

    sections = []
    names = set()
    for raw in raw_sections:
        try:
            section = _build(raw)
        except DatasetError as e:
            e.with_source(source)
            raise
        if section.name in names:
            raise ParseError(f"dataset '{section.name}' defined twice", line=raw.line, source=source)
        names.add(section.name)
        sections.append(section)
    return DatasetFile(sections=tuple(sections))


# ============================================================================
# Writing back
# ============================================================================

def _format_header(section: DatasetSection) -> str:
    keys = [k for k in KEY_ORDER if k in section.meta] + sorted(k for k in section.meta if k not in KEY_ORDER)
    pieces = []
    for key in keys:
        value = section.meta[key]
        if key in QUOTED_KEYS or not value or any(c in value for c in " []"):
            pieces.append(f'{key}="{value}"')
        else:
            pieces.append(f"{key}={value}")
    return f"[{section.kind} " + " ".join(pieces) + "]"


def serialize_dataset(dataset: DatasetFile) -> str:
    blocks = []
    for section in dataset.sections:
        lines = [_format_header(section)]
        if section.betti is not None:
            for degree, value in enumerate(section.betti.values):
                lines.append(f"{degree}: {value.exact if value.is_known else '?'}")
        elif section.gysin is not None:
            for (p, q), value in section.gysin.cells().items():
                lines.append(f"({p},{q}): {value}")
            for differential in section.gysin.forced_differentials:
                (p, q), (p2, q2) = differential.source, differential.target
                lines.append(f"differential ({p},{q})->({p2},{q2}): {differential.cancelled}")
        elif section.table is not None:
            for degree in section.table.degrees():
                line = f"{degree}: {section.table.at(degree)}"
                if degree in section.weights:
                    line += f" ; weight {section.weights[degree]}"
                lines.append(line)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
