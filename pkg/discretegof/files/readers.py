"""
Readers for counts files, model files, model spec strings and raw draw streams.

Counts files are UTF-8 CSV with the header `label,count`; model files use
`label,prob`. Counts are base-10 nonnegative integers without separators.
Every diagnostic names the file and the offending line (or byte offset for
binary draw files).
"""
import csv
import logging
import math
import re
from pathlib import Path
from typing import Iterator, List, Tuple, Union

import numpy as np

from ..config import DRAW_CHUNK_WORDS, MAX_TOTAL_COUNT
from ..engine.rng import StreamTag, check_seed, stream
from ..engine.sampling import uniform_draws
from ..errors import DataFormatError, InvalidArgument
from ..models.distribution import BinDistribution, EmpiricalCounts, make_uniform
from ..models.hardy_weinberg import HardyWeinbergFamily
from ..models.parametric import ParametricFamily
from ..models.poisson import poisson_model
from ..models.sparse import SparseUniformModel
from .datasets import resolve_path

logger = logging.getLogger(__name__)

Model = Union[BinDistribution, ParametricFamily, SparseUniformModel]

_COUNT = re.compile(r"[0-9]+")
_INTEGER = re.compile(r"[+]?[0-9]+")


# ============================================================================
# CSV TABLES
# ============================================================================

def _read_rows(path, header: Tuple[str, str]) -> List[Tuple[int, str, str]]:
    """(line, label, value) for each data row of a two-column CSV."""
    path = resolve_path(path)
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataFormatError(f"cannot open file: {exc.strerror}", source=str(path)) from None

    rows = []
    with handle:
        reader = csv.reader(handle)
        try:
            first = next(reader, None)
            if first is None:
                raise DataFormatError("file is empty", source=str(path))
            if [cell.strip().lower() for cell in first] != list(header):
                raise DataFormatError(
                    f"expected header '{','.join(header)}', got '{','.join(first)}'",
                    source=str(path), line=reader.line_num,
                )
            seen = set()
            for record in reader:
                if not record or all(not cell.strip() for cell in record):
                    continue
                if len(record) != 2:
                    raise DataFormatError(f"expected 2 fields, got {len(record)}",
                                          source=str(path), line=reader.line_num)
                label, value = record[0].strip(), record[1].strip()
                if not label:
                    raise DataFormatError("empty label", source=str(path), line=reader.line_num)
                if label in seen:
                    raise DataFormatError(f"duplicate label {label!r}",
                                          source=str(path), line=reader.line_num)
                seen.add(label)
                rows.append((reader.line_num, label, value))
        except UnicodeDecodeError:
            raise DataFormatError("file is not valid UTF-8", source=str(path)) from None
        except csv.Error as exc:
            raise DataFormatError(str(exc), source=str(path), line=reader.line_num) from None

    if not rows:
        raise DataFormatError("no data rows", source=str(path))
    return rows


def read_counts(path) -> EmpiricalCounts:
    """Dense counts with the file's labels, in file order."""
    rows = _read_rows(path, ("label", "count"))
    counts = []
    total = 0
    for line, label, value in rows:
        if not _COUNT.fullmatch(value):
            raise DataFormatError(f"count for {label!r} is not a nonnegative integer: {value!r}",
                                  source=str(path), line=line)
        counts.append(int(value))
        total += counts[-1]
        if total > MAX_TOTAL_COUNT:
            raise DataFormatError(f"counts up to {label!r} sum to more than {MAX_TOTAL_COUNT}",
                                  source=str(path), line=line)
    try:
        data = EmpiricalCounts.dense(counts, [label for _, label, _ in rows])
    except InvalidArgument as exc:
        raise DataFormatError(str(exc), source=str(path)) from None
    logger.debug("Read %d bins, n=%d from %s", data.num_bins, data.n, path)
    return data


def read_model_csv(path) -> BinDistribution:
    rows = _read_rows(path, ("label", "prob"))
    probs = []
    for line, label, value in rows:
        try:
            prob = float(value)
        except ValueError:
            prob = math.nan
        if not math.isfinite(prob):
            raise DataFormatError(f"probability for {label!r} is not a finite number: {value!r}",
                                  source=str(path), line=line)
        probs.append(prob)
    try:
        return BinDistribution(probs, [label for _, label, _ in rows])
    except InvalidArgument as exc:
        raise DataFormatError(str(exc), source=str(path)) from None


# ============================================================================
# MODEL SPECS
# ============================================================================

def _spec_argument(spec: str, kind, convert):
    _, _, raw = spec.partition(":")
    try:
        return convert(raw)
    except ValueError:
        raise InvalidArgument(f"Model spec {spec!r}: cannot read {kind} from {raw!r}") from None


def load_model(spec: str) -> Model:
    """
    Model from a spec string: `uniform:m`, `poisson:lambda`, `hw`,
    `sparse-uniform:M`, or the path of a `label,prob` CSV file.
    """
    name = spec.strip()
    key = name.lower()
    if key.startswith("uniform:"):
        return make_uniform(_spec_argument(name, "m", int))
    if key.startswith("poisson:"):
        return poisson_model(_spec_argument(name, "lambda", float)).distribution
    if key in ("hw", "hardy-weinberg"):
        return HardyWeinbergFamily()
    if key.startswith("sparse-uniform:"):
        return SparseUniformModel(_spec_argument(name, "M", int))
    if key.endswith(".csv") or Path(name).exists():
        return read_model_csv(name)
    raise InvalidArgument(
        f"Unknown model spec {spec!r}; expected uniform:m, poisson:lambda, hw, "
        "sparse-uniform:M or a label,prob CSV file"
    )


def align_counts(data: EmpiricalCounts, model: Model, source=None) -> EmpiricalCounts:
    """
    Reorder labelled counts to the model's bins. Model bins missing from the
    data count zero; a data label the model lacks is an error.
    """
    labels = getattr(model, "labels", None)
    if labels is None or data.labels is None:
        if data.num_bins != model.num_bins:
            raise DataFormatError(
                f"incompatible dimensions: data has {data.num_bins} bins, model has {model.num_bins}",
                source=source,
            )
        return data

    position = {label: i for i, label in enumerate(labels)}
    missing = [label for label in data.labels if label not in position]
    if missing:
        raise DataFormatError(
            f"incompatible dimensions: label(s) {', '.join(repr(m) for m in missing[:5])} "
            "not in the model",
            source=source,
        )
    counts = np.zeros(len(labels), dtype=np.int64)
    for label, count in zip(data.labels, data.counts):
        counts[position[label]] = count
    return EmpiricalCounts(counts, labels)


# ============================================================================
# RAW DRAWS
# ============================================================================

def _check_draw_range(draws: np.ndarray, support_size: int):
    bad = np.flatnonzero((draws < 1) | (draws > support_size))
    return None if bad.size == 0 else int(bad[0])


def read_text_draws(path, support_size: int) -> np.ndarray:
    """One base-10 integer per line; blank lines are skipped."""
    path = Path(path)
    draws = []
    try:
        with open(path, encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, 1):
                text = line.strip()
                if not text:
                    continue
                if not _INTEGER.fullmatch(text):
                    raise DataFormatError(f"not an integer: {text!r}", source=str(path), line=line_number)
                value = int(text)
                if not 1 <= value <= support_size:
                    raise DataFormatError(f"draw {value} outside 1..{support_size}",
                                          source=str(path), line=line_number)
                draws.append(value)
    except OSError as exc:
        raise DataFormatError(f"cannot open file: {exc.strerror}", source=str(path)) from None
    except UnicodeDecodeError:
        raise DataFormatError("file is not valid UTF-8 text", source=str(path)) from None
    return np.array(draws, dtype=np.int64)


def iter_binary_draws(path, support_size: int,
                      chunk_words: int = DRAW_CHUNK_WORDS) -> Iterator[np.ndarray]:
    """Little-endian uint32 words, `chunk_words` at a time; word w is draw w + 1."""
    path = Path(path)
    try:
        handle = open(path, "rb")
        size = path.stat().st_size
    except OSError as exc:
        raise DataFormatError(f"cannot open file: {exc.strerror}", source=str(path)) from None
    with handle:
        if size % 4:
            raise DataFormatError("length is not a multiple of 4 bytes",
                                  source=str(path), offset=size - size % 4)
        start = 0
        while True:
            words = np.fromfile(handle, dtype="<u4", count=chunk_words)
            if words.size == 0:
                return
            draws = words.astype(np.int64) + 1
            bad = _check_draw_range(draws, support_size)
            if bad is not None:
                raise DataFormatError(f"draw {draws[bad]} outside 1..{support_size}",
                                      source=str(path), offset=4 * (start + bad))
            start += words.size
            yield draws


def read_binary_draws(path, support_size: int) -> np.ndarray:
    chunks = list(iter_binary_draws(path, support_size))
    return np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)


def _resolve_draw_format(path, fmt: str) -> str:
    if fmt == "auto":
        return "binary" if str(path).lower().endswith((".bin", ".u32")) else "text"
    if fmt not in ("binary", "text"):
        raise InvalidArgument(f"Unknown draw format {fmt!r}; expected auto, text or binary")
    return fmt


def read_draws(path, support_size: int, fmt: str = "auto") -> np.ndarray:
    if _resolve_draw_format(path, fmt) == "binary":
        draws = read_binary_draws(path, support_size)
    else:
        draws = read_text_draws(path, support_size)
    if draws.size == 0:
        raise DataFormatError("no draws", source=str(path))
    logger.debug("Read %d draws from %s", draws.size, path)
    return draws


def read_draw_counts(path, support_size: int, fmt: str = "auto",
                     chunk_words: int = DRAW_CHUNK_WORDS) -> EmpiricalCounts:
    """
    Sparse counts of a draw file. Binary files are counted chunk by chunk, so
    memory grows with the number of distinct draws rather than the file size.
    """
    if _resolve_draw_format(path, fmt) == "text":
        return EmpiricalCounts.from_draws(read_draws(path, support_size, "text"), support_size)

    indices = np.empty(0, dtype=np.int64)
    counts = np.empty(0, dtype=np.int64)
    for draws in iter_binary_draws(path, support_size, chunk_words):
        seen, tally = np.unique(draws, return_counts=True)
        merged, inverse = np.unique(np.concatenate([indices, seen]), return_inverse=True)
        total = np.zeros(merged.size, dtype=np.int64)
        np.add.at(total, inverse, np.concatenate([counts, tally]))
        indices, counts = merged, total
    if indices.size == 0:
        raise DataFormatError("no draws", source=str(path))
    logger.debug("Counted %d distinct draws from %s", indices.size, path)
    return EmpiricalCounts(counts, indices=indices, support_size=support_size)


def generator_draws(spec: str, support_size: int, seed: int = 0) -> np.ndarray:
    """Draws from `sequential:N` (1..N) or `philox:N` (N draws from the DATA stream)."""
    name, _, raw = spec.strip().lower().partition(":")
    try:
        count = int(raw)
    except ValueError:
        raise InvalidArgument(f"Generator spec {spec!r}: cannot read a draw count") from None
    if count < 1:
        raise InvalidArgument(f"Generator spec {spec!r}: need at least one draw")
    if name == "sequential":
        if count > support_size:
            raise InvalidArgument(f"sequential:{count} exceeds the support 1..{support_size}")
        return np.arange(1, count + 1, dtype=np.int64)
    if name == "philox":
        return uniform_draws(support_size, count, stream(check_seed(seed), StreamTag.DATA, 0))
    raise InvalidArgument(f"Unknown generator {name!r}; expected sequential:N or philox:N")
