"""Command-line interface.

Exit codes: 0 success; 1 I/O or patch errors; 2 schema errors; 3 leakage
found under --fail-on-leak; 4 backend failed for every sample; 64 usage
errors raised by this tool's own checks (click reports flag misuse as 2).

Data goes to stdout, diagnostics to stderr, and every file-writing run drops
a resolved-config manifest next to its outputs. Outputs carry no timestamps:
identical inputs, flags, and seed produce byte-identical files.
"""

from __future__ import annotations

import json
import logging
import os
import sys

import click
import yaml

from linefix import dataset as ds
from linefix.client import DecodeConfig, BackendSpec, HttpBackend, MockBackend
from linefix.engine import apply_patch, derive_patch
from linefix.errors import LinefixError, SchemaError
from linefix.evaluation import DEFAULT_CWE_ORDER, evaluate, render_report
from linefix.patchfmt import parse_patch, serialize_patch
from linefix.source import from_text, to_text

logger = logging.getLogger("linefix")

EXIT_IO = 1
EXIT_SCHEMA = 2
EXIT_LEAK = 3
EXIT_BACKEND = 4
EXIT_USAGE = 64


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_yaml(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise SchemaError("config file must hold a mapping", path=path)
    return data


def _write_json(path: str, obj: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _write_manifest(path: str, command: str, inputs: dict, config: dict, **extra) -> None:
    _write_json(path, {"command": command, "inputs": inputs, "config": config, **extra})


def _ingest_or_die(path: str, fmt: str = "jsonl") -> ds.IngestResult:
    try:
        return ds.ingest(path, fmt)
    except SchemaError as exc:
        _fail(EXIT_SCHEMA, str(exc))
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    raise AssertionError("unreachable")


@click.group()
def main() -> None:
    """Tools for the line-addressed code-fix format."""
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["jsonl", "csv"]), default="jsonl",
              show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def ingest(input_path: str, fmt: str, out_path: str) -> None:
    """Read raw or training records, normalize them, and write them back out."""
    result = _ingest_or_die(input_path, fmt)
    try:
        ds.write_records_jsonl(result.records, out_path)
        _write_json(
            out_path + ".quarantine.json",
            {"quarantined": [q.to_dict() for q in result.quarantined]},
        )
        _write_manifest(
            out_path + ".manifest.json",
            "ingest",
            {"input": input_path, "format": fmt},
            {},
            counts=result.split_counts(),
            records=len(result.records),
            quarantined=len(result.quarantined),
        )
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    click.echo(f"ingested {len(result.records)} records"
               f" ({len(result.quarantined)} quarantined) -> {out_path}", err=True)


@main.command("audit-overlap")
@click.option("--train", "train_path", required=True, type=click.Path())
@click.option("--test", "test_path", required=True, type=click.Path())
@click.option("--mode", type=click.Choice(list(ds.FINGERPRINT_MODES)), default="exact",
              show_default=True)
@click.option("--fail-on-leak", is_flag=True, help="Exit 3 when any overlap is found.")
def audit_overlap(train_path: str, test_path: str, mode: str, fail_on_leak: bool) -> None:
    """Measure test-into-train leakage between two record files."""
    train = _ingest_or_die(train_path).records
    test = _ingest_or_die(test_path).records
    try:
        manifest = ds.detect_overlap(train, test, mode)
    except ValueError as exc:
        _fail(EXIT_USAGE, str(exc))
        return
    click.echo(json.dumps(manifest.to_dict(), indent=2))
    if fail_on_leak and manifest.overlap_count > 0:
        _fail(EXIT_LEAK, f"{manifest.overlap_count} overlapping records")


@main.command()
@click.option("--train", "train_path", required=True, type=click.Path())
@click.option("--test", "test_path", required=True, type=click.Path())
@click.option("--mode", type=click.Choice(list(ds.FINGERPRINT_MODES)), default="exact",
              show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def refine(train_path: str, test_path: str, mode: str, out_path: str) -> None:
    """Drop train records that leak into test, then dedupe train."""
    train = _ingest_or_die(train_path).records
    test = _ingest_or_die(test_path).records
    try:
        refined, manifest = ds.refine(train, test, mode)
    except ValueError as exc:
        _fail(EXIT_USAGE, str(exc))
        return
    try:
        ds.write_records_jsonl(refined, out_path)
        _write_manifest(
            out_path + ".manifest.json",
            "refine",
            {"train": train_path, "test": test_path},
            {"mode": mode},
            result=manifest.to_dict(),
        )
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    click.echo(f"kept {len(refined)}/{len(train)} train records -> {out_path}", err=True)


@main.command("export-train")
@click.option("--records", "records_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
def export_train(records_path: str, out_path: str) -> None:
    """Write prompt/completion pairs for training."""
    result = _ingest_or_die(records_path)
    try:
        export = ds.export_jsonl(result.records, out_path)
        _write_json(
            out_path + ".quarantine.json",
            {"quarantined": [q.to_dict() for q in export.quarantined]},
        )
        _write_manifest(
            out_path + ".manifest.json",
            "export-train",
            {"records": records_path},
            {},
            written=export.written,
            quarantined=len(export.quarantined) + len(result.quarantined),
        )
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
    click.echo(f"wrote {export.written} examples -> {out_path}", err=True)


@main.command("apply")
@click.option("--source", "source_path", required=True, type=click.Path())
@click.option("--patch", "patch_path", required=True, type=click.Path())
def apply_cmd(source_path: str, patch_path: str) -> None:
    """Apply a patch file to a source file; patched text goes to stdout."""
    try:
        with open(source_path, encoding="utf-8") as fh:
            src = from_text(fh.read())
        with open(patch_path, encoding="utf-8") as fh:
            patch = parse_patch(fh.read())
        result = apply_patch(src, patch)
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
        return
    except LinefixError as exc:
        _fail(EXIT_IO, str(exc))
        return
    sys.stdout.write(to_text(result))


@main.command("derive")
@click.option("--before", "before_path", required=True, type=click.Path())
@click.option("--after", "after_path", required=True, type=click.Path())
def derive_cmd(before_path: str, after_path: str) -> None:
    """Derive the minimal patch between two source files; DSL goes to stdout."""
    try:
        with open(before_path, encoding="utf-8") as fh:
            before = from_text(fh.read())
        with open(after_path, encoding="utf-8") as fh:
            after = from_text(fh.read())
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
        return
    sys.stdout.write(serialize_patch(derive_patch(before, after)) + "\n")


@main.command("evaluate")
@click.option("--records", "records_path", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="YAML config; flags given on the command line win.")
@click.option("--backend-config", "backend_config_path", type=click.Path(), default=None)
@click.option("--mock-script", "mock_script_path", type=click.Path(), default=None)
@click.option("--strategy", type=click.Choice(["beam", "sample"]), default=None)
@click.option("--k", type=int, default=None)
@click.option("--temperature", type=float, default=None)
@click.option("--max-new-tokens", type=int, default=None)
@click.option("--stop", "stop_sequences", multiple=True)
@click.option("--max-in-flight", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--cwe", "cwe_list", multiple=True,
              help="CWE ids for the breakdown, in render order.")
@click.option("--strict", is_flag=True, help="Exact bytes, no trailing-LF allowance.")
@click.option("--report-dir", "report_dir", required=True, type=click.Path())
def evaluate_cmd(
    records_path: str,
    config_path: str | None,
    backend_config_path: str | None,
    mock_script_path: str | None,
    strategy: str | None,
    k: int | None,
    temperature: float | None,
    max_new_tokens: int | None,
    stop_sequences: tuple[str, ...],
    max_in_flight: int | None,
    seed: int | None,
    cwe_list: tuple[str, ...],
    strict: bool,
    report_dir: str,
) -> None:
    """Generate candidates for every record and score exact matches."""
    file_cfg: dict = {}
    if config_path is not None:
        try:
            file_cfg = _load_yaml(config_path)
        except SchemaError as exc:
            _fail(EXIT_SCHEMA, str(exc))
        except OSError as exc:
            _fail(EXIT_IO, str(exc))
    decode_cfg = dict(file_cfg.get("decode", {}))
    backend_cfg = dict(file_cfg.get("backend", {}))

    if (backend_config_path is None) == (mock_script_path is None):
        _fail(EXIT_USAGE, "exactly one of --backend-config or --mock-script is required")

    resolved = {
        "strategy": strategy or decode_cfg.get("strategy", "beam"),
        "k": k if k is not None else int(decode_cfg.get("k", 5)),
        "temperature": temperature if temperature is not None
        else float(decode_cfg.get("temperature", 0.8)),
        "max_new_tokens": max_new_tokens if max_new_tokens is not None
        else int(decode_cfg.get("max_new_tokens", 256)),
        "stop_sequences": list(stop_sequences) or list(decode_cfg.get("stop", [])),
        "seed": seed if seed is not None else file_cfg.get("seed"),
        "cwe_list": list(cwe_list) or list(file_cfg.get("cwe_list", DEFAULT_CWE_ORDER)),
        "strict": strict or bool(file_cfg.get("strict", False)),
    }
    try:
        cfg = DecodeConfig(
            strategy=resolved["strategy"],
            k=resolved["k"],
            temperature=resolved["temperature"],
            max_new_tokens=resolved["max_new_tokens"],
            stop_sequences=tuple(resolved["stop_sequences"]),
            seed=resolved["seed"],
        )
    except ValueError as exc:
        _fail(EXIT_USAGE, str(exc))
        return

    try:
        if backend_config_path is not None:
            raw = _load_yaml(backend_config_path)
            backend_cfg.update(raw.get("backend", raw))
        if max_in_flight is not None:
            backend_cfg["max_in_flight"] = max_in_flight
        spec = BackendSpec(**backend_cfg)
        if mock_script_path is not None:
            backend = MockBackend.from_file(mock_script_path, spec)
        else:
            backend = HttpBackend(spec)
    except SchemaError as exc:
        _fail(EXIT_SCHEMA, str(exc))
        return
    except (TypeError, ValueError) as exc:
        _fail(EXIT_USAGE, f"bad backend config: {exc}")
        return
    except OSError as exc:
        _fail(EXIT_IO, str(exc))
        return

    result = _ingest_or_die(records_path)
    if result.quarantined:
        click.echo(f"{len(result.quarantined)} records quarantined at ingest", err=True)
    records = [r.vuln for r in result.records]

    try:
        report = evaluate(
            records,
            backend,
            cfg,
            cwe_order=tuple(resolved["cwe_list"]),
            strict=resolved["strict"],
        )
    except LinefixError as exc:
        _fail(EXIT_USAGE, str(exc))
        return

    try:
        os.makedirs(report_dir, exist_ok=True)
        for fmt, name in (("json", "report.json"), ("text", "report.txt"), ("csv", "report.csv")):
            with open(os.path.join(report_dir, name), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(render_report(report, fmt))
        _write_manifest(
            os.path.join(report_dir, "resolved_config.json"),
            "evaluate",
            {
                "records": records_path,
                "backend_config": backend_config_path,
                "mock_script": mock_script_path,
            },
            {
                **resolved,
                "max_in_flight": spec.max_in_flight,
                "backend_endpoint": spec.endpoint,
            },
        )
    except OSError as exc:
        _fail(EXIT_IO, str(exc))

    click.echo(
        f"pp {report.pp_hits}/{report.pp_total} rate {report.pp_rate:.4f}"
        f" (reports in {report_dir})"
    )
    if report.backend_error_count == report.pp_total:
        _fail(EXIT_BACKEND, "backend failed for every sample")


if __name__ == "__main__":
    main()
