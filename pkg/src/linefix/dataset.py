"""Dataset ingestion, fingerprinting, leakage refinement, and export.

Two on-disk schemas are understood and auto-detected per file:

raw schema (JSONL or CSV)
    ``id, cve_id?, cwe_id, cwe_description, vuln_lines?, source_before,
    source_after, split``. ``vuln_lines`` falls back to the before-side
    changed lines of the derived reference patch. Sources carrying the
    upstream bug markers (``<S2SV_StartBug>`` / ``<S2SV_EndBug>``) are
    accepted: the markers are stripped and the marked lines become
    ``vuln_lines``.

training schema (JSONL)
    ``id, prompt, completion, cwe_id, split`` as written by export_jsonl;
    records are reconstructed by parsing the prompt and completion, so
    ingest -> export -> ingest is a fixed point.

Structural problems (missing fields, undecodable rows) raise SchemaError.
Records that decode but violate an invariant are quarantined with a reason,
never silently dropped.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
import re
from collections import Counter
from dataclasses import dataclass, field, replace

from linefix.engine import apply_patch, changed_before_lines, derive_patch, validate_patch
from linefix.errors import (
    InvalidRecord,
    LinefixError,
    MissingReference,
    SchemaError,
)
from linefix.prompting import (
    RESERVED_TOKENS,
    VulnRecord,
    parse_prompt,
    render_training_example,
)
from linefix.patchfmt import parse_patch, serialize_patch
from linefix.source import from_text, to_text

SPLITS = ("train", "validation", "test")
FINGERPRINT_MODES = ("exact", "ws_normalized")

BUG_START = "<S2SV_StartBug>"
BUG_END = "<S2SV_EndBug>"

_RAW_REQUIRED = ("id", "cwe_id", "cwe_description", "source_before", "source_after", "split")
_TRAINING_REQUIRED = ("id", "cwe_id", "prompt", "completion", "split")

_WS_RUN = re.compile(r"\s+")


@dataclass
class DatasetRecord:
    """One corpus record: split tag plus the normalized payload."""

    split: str
    vuln: VulnRecord
    raw_before: str
    raw_after: str


@dataclass(frozen=True)
class Fingerprint:
    digest: str  # sha256 hex, 256 bits
    mode: str


@dataclass
class QuarantineEntry:
    reason: str
    record_id: str | None = None
    line_no: int | None = None

    def to_dict(self) -> dict:
        return {"record_id": self.record_id, "line_no": self.line_no, "reason": self.reason}


@dataclass
class IngestResult:
    records: list[DatasetRecord]
    quarantined: list[QuarantineEntry] = field(default_factory=list)

    def split_counts(self) -> dict[str, int]:
        counts = Counter(r.split for r in self.records)
        return {s: counts[s] for s in SPLITS if s in counts}


@dataclass
class SplitManifest:
    """Counts and leakage numbers for one pipeline step."""

    counts: dict[str, int]
    train_duplicates: int
    overlap_count: int
    overlap_fraction: float
    mode: str
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "counts": dict(self.counts),
            "train_duplicates": self.train_duplicates,
            "overlap_count": self.overlap_count,
            "overlap_fraction": self.overlap_fraction,
            "mode": self.mode,
            "seed": self.seed,
        }


@dataclass
class ExportResult:
    written: int
    quarantined: list[QuarantineEntry] = field(default_factory=list)


@dataclass
class CorpusStats:
    per_cwe: dict[str, int]
    total: int


# --- reading ----------------------------------------------------------------


def _read_jsonl(path: str) -> list[tuple[int, dict]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"undecodable JSON: {exc}", path=path, line_no=line_no)
            if not isinstance(obj, dict):
                raise SchemaError("row is not an object", path=path, line_no=line_no)
            rows.append((line_no, obj))
    return rows


def _read_csv(path: str) -> list[tuple[int, dict]]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for obj in reader:
            if None in obj:
                raise SchemaError("row has more cells than header", path=path, line_no=reader.line_num)
            row = dict(obj)
            if "vuln_lines" in row:
                cell = row["vuln_lines"]
                if cell is None or cell == "":
                    row.pop("vuln_lines")
                else:
                    try:
                        row["vuln_lines"] = json.loads(cell)
                    except json.JSONDecodeError:
                        raise SchemaError(
                            f"vuln_lines cell is not a JSON list: {cell!r}",
                            path=path,
                            line_no=reader.line_num,
                        )
            if row.get("cve_id") == "":
                row["cve_id"] = None
            rows.append((reader.line_num, row))
    return rows


def _require(row: dict, fields: tuple[str, ...], path: str, line_no: int) -> None:
    for name in fields:
        if name not in row or row[name] is None:
            raise SchemaError(f"missing required field {name!r}", path=path, line_no=line_no)
        if name != "vuln_lines" and not isinstance(row[name], str):
            raise SchemaError(
                f"field {name!r} must be a string, got {type(row[name]).__name__}",
                path=path,
                line_no=line_no,
            )


def strip_bug_markers(text: str) -> tuple[str, list[int]]:
    """Remove upstream bug markers, returning clean text and marked line indices.

    A line containing either marker counts as marked; the marker token plus
    one adjacent space is dropped so surrounding code is left untouched.
    """
    unit = from_text(text)
    clean: list[str] = []
    marked: list[int] = []
    for i, line in enumerate(unit.lines):
        if BUG_START in line or BUG_END in line:
            marked.append(i)
            for token in (BUG_START, BUG_END):
                line = line.replace(token + " ", "").replace(" " + token, "").replace(token, "")
        clean.append(line)
    out = "\n".join(clean)
    if unit.had_trailing_newline:
        out += "\n"
    return out, marked


def _record_from_raw(row: dict, path: str, line_no: int) -> DatasetRecord:
    _require(row, _RAW_REQUIRED, path, line_no)
    split = row["split"]
    if split not in SPLITS:
        raise SchemaError(f"unknown split {split!r}", path=path, line_no=line_no)
    raw_before, raw_after = row["source_before"], row["source_after"]

    marker_lines: list[int] | None = None
    if BUG_START in raw_before or BUG_END in raw_before:
        raw_before, marker_lines = strip_bug_markers(raw_before)

    for token in RESERVED_TOKENS + (BUG_START, BUG_END):
        if token in raw_before or token in raw_after:
            raise InvalidRecord(f"source contains reserved token {token}")
    if "\n" in row["cwe_description"]:
        raise InvalidRecord("cwe_description contains a line feed")

    src = from_text(raw_before)
    after = from_text(raw_after)
    patch = derive_patch(src, after)

    vuln_lines = row.get("vuln_lines")
    if vuln_lines is not None:
        if not isinstance(vuln_lines, list) or not all(isinstance(i, int) for i in vuln_lines):
            raise SchemaError("vuln_lines must be a list of integers", path=path, line_no=line_no)
        vuln_lines = sorted(set(vuln_lines))
    elif marker_lines:
        vuln_lines = marker_lines
    else:
        vuln_lines = changed_before_lines(patch)

    vuln = VulnRecord(
        id=row["id"],
        cwe_id=row["cwe_id"],
        cwe_description=row["cwe_description"],
        vuln_lines=tuple(vuln_lines),
        source=src,
        cve_id=row.get("cve_id"),
        reference_after=after,
        reference_patch=patch,
    )
    vuln.validate()
    return DatasetRecord(split, vuln, to_text(src), to_text(after))


def _record_from_training(row: dict, path: str, line_no: int) -> DatasetRecord:
    _require(row, _TRAINING_REQUIRED, path, line_no)
    split = row["split"]
    if split not in SPLITS:
        raise SchemaError(f"unknown split {split!r}", path=path, line_no=line_no)
    parsed = parse_prompt(row["prompt"])
    if parsed.cwe_id != row["cwe_id"]:
        raise InvalidRecord(
            f"cwe_id field {row['cwe_id']!r} disagrees with prompt {parsed.cwe_id!r}"
        )
    patch = parse_patch(row["completion"])
    report = validate_patch(parsed.source, patch)
    if not report.ok:
        raise InvalidRecord(f"completion does not validate: {report.summary()}")
    after = apply_patch(parsed.source, patch)
    vuln = VulnRecord(
        id=row["id"],
        cwe_id=parsed.cwe_id,
        cwe_description=parsed.cwe_description,
        vuln_lines=parsed.vuln_lines,
        source=parsed.source,
        reference_after=after,
        reference_patch=patch,
    )
    vuln.validate()
    return DatasetRecord(split, vuln, to_text(parsed.source), to_text(after))


def ingest(path: str, fmt: str = "jsonl") -> IngestResult:
    """Read a records file; invariant violations land in the quarantine list."""
    if fmt == "jsonl":
        rows = _read_jsonl(path)
    elif fmt == "csv":
        rows = _read_csv(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    result = IngestResult(records=[])
    for line_no, row in rows:
        builder = _record_from_training if "prompt" in row else _record_from_raw
        try:
            result.records.append(builder(row, path, line_no))
        except SchemaError:
            raise
        except LinefixError as exc:
            result.quarantined.append(
                QuarantineEntry(reason=str(exc), record_id=row.get("id"), line_no=line_no)
            )
    return result


# --- writing ----------------------------------------------------------------


def write_records_jsonl(records: list[DatasetRecord], path: str) -> None:
    """Write records back out in the raw schema (UTF-8, LF line ends)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            obj = {
                "id": r.vuln.id,
                "cve_id": r.vuln.cve_id,
                "cwe_id": r.vuln.cwe_id,
                "cwe_description": r.vuln.cwe_description,
                "vuln_lines": list(r.vuln.vuln_lines),
                "source_before": r.raw_before,
                "source_after": r.raw_after,
                "split": r.split,
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def export_jsonl(records: list[DatasetRecord], path: str) -> ExportResult:
    """Write the training schema; records without a reference are quarantined."""
    written = 0
    quarantined: list[QuarantineEntry] = []
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            try:
                example = render_training_example(r.vuln)
            except (MissingReference, InvalidRecord) as exc:
                quarantined.append(QuarantineEntry(reason=str(exc), record_id=r.vuln.id))
                continue
            obj = {
                "id": r.vuln.id,
                "prompt": example.prompt,
                "completion": example.completion,
                "cwe_id": r.vuln.cwe_id,
                "split": r.split,
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
            written += 1
    return ExportResult(written, quarantined)


# --- fingerprinting and refinement -------------------------------------------


def _squash_ws(text: str) -> str:
    return _WS_RUN.sub(" ", text).strip()


def compute_fingerprint(record: DatasetRecord, mode: str = "exact") -> Fingerprint:
    """Content hash over the before-source and the serialized reference patch.

    ``exact`` hashes bytes as-is; ``ws_normalized`` first collapses every
    whitespace run to one space and trims the ends, so indentation-only
    variants collide on purpose.
    """
    if mode not in FINGERPRINT_MODES:
        raise ValueError(f"unknown fingerprint mode {mode!r}")
    patch = record.vuln.reference_patch
    if patch is None:
        if record.vuln.reference_after is None:
            raise MissingReference(f"record {record.vuln.id!r} has no reference fix")
        patch = derive_patch(record.vuln.source, record.vuln.reference_after)
    src_text = "\n".join(record.vuln.source.lines)
    patch_text = serialize_patch(patch)
    if mode == "ws_normalized":
        src_text = _squash_ws(src_text)
        patch_text = _squash_ws(patch_text)
    digest = hashlib.sha256(
        src_text.encode("utf-8") + b"\x00" + patch_text.encode("utf-8")
    ).hexdigest()
    return Fingerprint(digest, mode)


def _digests(records: list[DatasetRecord], mode: str) -> list[str]:
    return [compute_fingerprint(r, mode).digest for r in records]


def detect_overlap(
    train: list[DatasetRecord], test: list[DatasetRecord], mode: str = "exact"
) -> SplitManifest:
    """Measure test-side leakage: the fraction of test records seen in train."""
    if not train or not test:
        raise ValueError("detect_overlap needs non-empty train and test")
    train_digests = _digests(train, mode)
    train_set = set(train_digests)
    overlap = sum(1 for d in _digests(test, mode) if d in train_set)
    return SplitManifest(
        counts={"train": len(train), "test": len(test)},
        train_duplicates=len(train_digests) - len(train_set),
        overlap_count=overlap,
        overlap_fraction=overlap / len(test),
        mode=mode,
    )


def refine(
    train: list[DatasetRecord], test: list[DatasetRecord], mode: str = "exact"
) -> tuple[list[DatasetRecord], SplitManifest]:
    """Drop train records fingerprinted in test, then dedupe train keeping first.

    detect_overlap on the result is exactly zero and running refine again is a
    no-op. The manifest reports what was found and removed: overlap_count is
    the test-side leakage of the input train set.
    """
    if not train or not test:
        raise ValueError("refine needs non-empty train and test")
    test_digests = _digests(test, mode)
    test_set = set(test_digests)
    train_digests = _digests(train, mode)
    train_set = set(train_digests)
    overlap = sum(1 for d in test_digests if d in train_set)
    kept: list[DatasetRecord] = []
    seen: set[str] = set()
    dropped_dup = 0
    for record, digest in zip(train, train_digests):
        if digest in test_set:
            continue
        if digest in seen:
            dropped_dup += 1
            continue
        seen.add(digest)
        kept.append(record)
    manifest = SplitManifest(
        counts={"train": len(kept), "test": len(test)},
        train_duplicates=dropped_dup,
        overlap_count=overlap,
        overlap_fraction=overlap / len(test),
        mode=mode,
    )
    return kept, manifest


def split_validation(
    train: list[DatasetRecord], fraction: float, seed: int
) -> tuple[list[DatasetRecord], list[DatasetRecord]]:
    """Carve a validation set of round(fraction * len(train)) records.

    Selection is a seeded uniform draw without replacement; both outputs keep
    the original record order, and chosen records are retagged ``validation``.

    The size rule here is exactly ``round(fraction * len(train))`` — e.g.
    6,429 records at 5% yields 321.  The upstream corpus ships 338 validation
    records for a train split of that size; its rounding base is not
    recoverable from the published splits, so this function documents its own
    deterministic rule instead of claiming to reproduce that count.
    """
    if not 0 < fraction < 1:
        raise ValueError("fraction must be in (0, 1)")
    k = round(fraction * len(train))
    chosen = set(random.Random(seed).sample(range(len(train)), k))
    kept = [r for i, r in enumerate(train) if i not in chosen]
    validation = [
        replace(r, split="validation") for i, r in enumerate(train) if i in chosen
    ]
    return kept, validation


def stats(records: list[DatasetRecord]) -> CorpusStats:
    """Record counts keyed by CWE id, most frequent first."""
    counts = Counter(r.vuln.cwe_id for r in records)
    ordered = dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
    return CorpusStats(per_cwe=ordered, total=len(records))
