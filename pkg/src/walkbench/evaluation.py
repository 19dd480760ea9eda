"""Answer extraction, per-question scoring and table aggregation."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from . import maze as mz
from .agent import Transcript
from .benchmark import ARGMAX, EXACT_SET, SINGLE_COUNT, SPECS, TEMPLATES, VALUE, GoldAnswer, QueryInstance

DIRECT, FENCED, EMBEDDED, LLM_FALLBACK, FAILED = "direct-json", "fenced-json", "embedded-json", "llm-fallback", "failed"

_FENCE = re.compile(r"```(?:json|JSON)?\s*\n?(.*?)```", re.S)
_FIELD = re.compile(r'"(\w+)"\s*:')

Extractor = Callable[[str, str], str]


@dataclass
class ExtractedAnswer:
    records: list[dict]
    method: str
    dropped_fields: list[str] = field(default_factory=list)


def schema_fields(output_schema: str) -> list[str]:
    return list(dict.fromkeys(_FIELD.findall(output_schema)))


def _records(obj, fields: list[str]) -> tuple[list[dict], list[str]] | None:
    """Coerce a decoded JSON value into schema records, or None when it cannot be one."""
    if isinstance(obj, dict):
        if not any(f in obj for f in fields):
            lists = [v for v in obj.values() if isinstance(v, list)]
            # wrapper objects such as {"results": [...]}
            return _records(lists[0], fields) if len(lists) == 1 else None
        obj = [obj]
    elif not isinstance(obj, list):
        return ([{fields[0]: obj}], []) if len(fields) == 1 else None
    if len(fields) == 1 and obj and all(not isinstance(x, (dict, list)) for x in obj):
        return [{fields[0]: x} for x in obj], []
    out, dropped = [], []
    for item in obj:
        if not isinstance(item, dict):
            return None
        kept = {f: item[f] for f in fields if f in item}
        dropped.extend(k for k in item if k not in fields)
        if kept:
            out.append(kept)
    if obj and not out:
        return None
    return out, sorted(set(dropped))


def _json_candidates(text: str) -> Iterable:
    decoder = json.JSONDecoder()
    i = 0
    while i < len(text):
        if text[i] in "[{":
            try:
                obj, end = decoder.raw_decode(text, i)
            except json.JSONDecodeError:
                i += 1
                continue
            yield obj
            i = end
        else:
            i += 1


def extract_answer(final_text: str | None, output_schema: str, llm: Extractor | None = None) -> ExtractedAnswer:
    """Pull schema records out of free text.

    Tries the whole text as JSON, then fenced code blocks, then any
    bracket-balanced JSON inside the text (the last one that fits the schema
    wins, since models tend to answer at the end). ``llm`` is an optional
    last resort that rewrites the text into JSON.
    """
    fields = schema_fields(output_schema)
    text = (final_text or "").strip()
    if not fields or not text:
        return ExtractedAnswer([], FAILED)

    try:
        got = _records(json.loads(text), fields)
        if got is not None:
            return ExtractedAnswer(got[0], DIRECT, got[1])
    except json.JSONDecodeError:
        pass

    for block in _FENCE.findall(text):
        try:
            got = _records(json.loads(block.strip()), fields)
        except json.JSONDecodeError:
            continue
        if got is not None:
            return ExtractedAnswer(got[0], FENCED, got[1])

    found = None
    for obj in _json_candidates(text):
        if isinstance(obj, (list, dict)):
            got = _records(obj, fields)
            if got is not None and got[0]:
                found = got
    if found is not None:
        return ExtractedAnswer(found[0], EMBEDDED, found[1])

    if llm is not None:
        rewritten = llm(text, output_schema)
        inner = extract_answer(rewritten, output_schema)
        if inner.method != FAILED:
            return ExtractedAnswer(inner.records, LLM_FALLBACK, inner.dropped_fields)
    return ExtractedAnswer([], FAILED)


def extract_path(final_text: str | None) -> list[str]:
    """Cell keys from a maze answer: {"path": [...]} or a bare list."""
    got = extract_answer(final_text, '{"path": ["string"]}')
    for rec in got.records:
        if isinstance(rec.get("path"), list):
            return [str(k) for k in rec["path"]]
    for obj in _json_candidates((final_text or "").strip()):
        if isinstance(obj, list) and obj and all(isinstance(k, (str, int)) for k in obj):
            return [str(k) for k in obj]
    return []


# -- scoring ------------------------------------------------------------------------


def canonical(value) -> str:
    """Case-preserving canonical form; numbers and numeric strings compare by value."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return _number(float(value))
    if isinstance(value, str):
        s = value.strip()
        try:
            f = float(s)
        except ValueError:
            return s
        return _number(f) if math.isfinite(f) else s
    return json.dumps(value, sort_keys=True)


def _number(f: float) -> str:
    return str(int(f)) if f.is_integer() else repr(f)


def _canon_set(records, fields) -> set[tuple]:
    return {tuple(canonical(r.get(f)) for f in fields) for r in records}


@dataclass
class QuestionScore:
    correct: bool
    precision: float
    recall: float
    f1: float
    false_positives: int
    tool_calls: int = 0
    inference_time: float = 0.0
    model: str = ""
    with_tools: bool = True
    template: str = ""
    category: str = ""


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def score(extracted: ExtractedAnswer | list[dict], gold: GoldAnswer) -> QuestionScore:
    """Grade one answer.

    Set questions need exact set equality to count as correct, with
    precision and recall over records. Count, argmax and value questions
    expect a single answer: correct when exactly one distinct record is
    given and it is in the gold set; anything predicted outside the gold
    set counts as a false positive.
    """
    if not gold:
        raise ValueError("gold answer is empty")
    records = extracted.records if isinstance(extracted, ExtractedAnswer) else list(extracted)
    pred = _canon_set(records, gold.fields)
    truth = _canon_set(gold.records, gold.fields)
    hit = len(pred & truth)
    fp = len(pred - truth)
    if gold.mode == EXACT_SET:
        p = hit / len(pred) if pred else 0.0
        r = hit / len(truth)
        return QuestionScore(pred == truth, p, r, _f1(p, r), fp)
    if gold.mode not in (SINGLE_COUNT, ARGMAX, VALUE):
        raise ValueError(f"unknown scoring mode {gold.mode!r}")
    ok = len(pred) == 1 and hit == 1
    v = 1.0 if ok else 0.0
    return QuestionScore(ok, v, v, v, fp)


def score_transcript(t: Transcript, llm: Extractor | None = None) -> QuestionScore:
    """Score from the transcript alone; tool calls are recounted from its events."""
    kind = t.meta.get("kind")
    if kind == "kg":
        inst = QueryInstance.from_dict(t.meta["instance"])
        gold = GoldAnswer.from_dict(t.meta["gold"])
        s = score(extract_answer(t.final_answer, inst.output_schema, llm), gold)
        s.template, s.category = inst.template.value, inst.spec.category
    elif kind == "maze":
        state = mz.MazeState.from_dict(t.meta["maze"])
        ok = mz.validate_path(state, extract_path(t.final_answer)).valid
        v = 1.0 if ok else 0.0
        s = QuestionScore(ok, v, v, v, 0 if ok else 1, template="maze", category="maze")
    else:
        raise ValueError(f"transcript {t.episode_id} has no scorable meta (kind={kind!r})")
    s.tool_calls = t.tool_calls
    s.inference_time = t.inference_time
    s.model, s.with_tools = t.model, t.with_tools
    return s


# -- aggregation ----------------------------------------------------------------------

LAYOUTS = ("table1", "maze", "table2")


@dataclass
class ReportRow:
    model: str
    with_tools: bool
    questions: int
    correct: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    false_positives: int
    tool_calls: int
    mean_tool_calls: float
    mean_inference_time: float
    by_template: dict[str, int]

    @property
    def setting(self) -> str:
        return "tools" if self.with_tools else "no-tools"


@dataclass
class Report:
    layout: str
    rows: list[ReportRow]

    def to_json(self) -> str:
        return json.dumps({"layout": self.layout, "rows": [asdict(r) for r in self.rows]}, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.layout == "table2":
            names = [SPECS[t].display for t in TEMPLATES]
            w.writerow(["Category", "Query Type", *[f"{r.model} ({r.setting})" for r in self.rows], "Total"])
            for t, name in zip(TEMPLATES, names):
                counts = [r.by_template.get(t.value, 0) for r in self.rows]
                w.writerow([SPECS[t].category, name, *counts, sum(counts)])
            totals = [r.correct for r in self.rows]
            w.writerow(["", "Total", *totals, sum(totals)])
            return buf.getvalue()
        tc_name = "Avg TC" if self.layout == "maze" else "TC"
        w.writerow(["Model", "Setting", "C", "A", "P", "R", "F1", "FP", tc_name, "Time"])
        for r in self.rows:
            tc = f"{r.mean_tool_calls:.2f}" if self.layout == "maze" else str(r.tool_calls)
            w.writerow(
                [
                    r.model, r.setting, r.correct, f"{r.accuracy:.2f}", f"{r.precision:.2f}", f"{r.recall:.2f}",
                    f"{r.f1:.2f}", r.false_positives, tc, f"{r.mean_inference_time:.2f}",
                ]
            )
        return buf.getvalue()


def aggregate(scores: Iterable[QuestionScore], layout: str = "table1") -> Report:
    """Group by (model, setting) and compute the table columns."""
    if layout not in LAYOUTS:
        raise ValueError(f"unknown layout {layout!r}; choose from {', '.join(LAYOUTS)}")
    scores = list(scores)
    if not scores:
        raise ValueError("no scores to aggregate")
    groups: dict[tuple[str, bool], list[QuestionScore]] = {}
    for s in scores:
        groups.setdefault((s.model, s.with_tools), []).append(s)
    rows = []
    for (model, tools), group in sorted(groups.items(), key=lambda kv: (kv[0][0], not kv[0][1])):
        n = len(group)
        correct = sum(s.correct for s in group)
        by_template: dict[str, int] = {}
        for s in group:
            by_template[s.template] = by_template.get(s.template, 0) + int(s.correct)
        tc = sum(s.tool_calls for s in group)
        rows.append(
            ReportRow(
                model, tools, n, correct, round(100 * correct / n, 2),
                sum(s.precision for s in group) / n, sum(s.recall for s in group) / n, sum(s.f1 for s in group) / n,
                sum(s.false_positives for s in group), tc, tc / n, sum(s.inference_time for s in group) / n,
                by_template,
            )
        )
    return Report(layout, rows)


def load_transcripts(path) -> list[Transcript]:
    """Read one transcript file or every ``*.jsonl`` under a directory."""
    path = Path(path)
    files = sorted(path.rglob("*.jsonl")) if path.is_dir() else [path]
    return [Transcript.read(f) for f in files]
