"""Small helpers for the line-delimited JSON files used across the pipeline."""

import json
from pathlib import Path

from .errors import MalformedRecord


def read_jsonl(path):
    """Yield (line_no, record) for each non-blank line; line numbers are 1-based."""
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(line_no, str(exc)) from exc
        if not isinstance(record, dict):
            raise MalformedRecord(line_no, "expected a JSON object")
        yield line_no, record


def write_jsonl(path, records):
    """Write one compact JSON object per line. Floats keep full repr precision."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, separators=(",", ":"), sort_keys=False))
            fh.write("\n")


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_json(path, document):
    Path(path).write_text(
        json.dumps(document, indent=2, sort_keys=False) + "\n", encoding="utf-8"
    )
