"""Corpus ingestion: parsing line-delimited post records, hashtag and
base-domain extraction, domain filtering, and balanced language sampling.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import resources
from typing import IO, Iterable, Iterator

from .errors import DomainExtractionError, SchemaError

_HASHTAG_RE = re.compile(r"#(\w+)", re.UNICODE)

_COUNT_FIELDS = ("like_count", "retweet_count", "quote_count", "reply_count")


def _load_data_lines(name: str) -> list[str]:
    text = resources.files("coordnet._data").joinpath(name).read_text("utf-8")
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


# ---------------------------------------------------------------------------
# Base-domain extraction


class _SuffixTable:
    """Longest-match lookup over the bundled public-suffix snapshot."""

    def __init__(self, suffixes: Iterable[str]):
        self._suffixes = frozenset(s.lower() for s in suffixes)

    def base_domain(self, host: str) -> str:
        labels = host.lower().strip(".").split(".")
        if len(labels) < 2 or any(not lab for lab in labels):
            raise DomainExtractionError(f"host has no registrable domain: {host!r}")
        # Longest public suffix wins; unknown TLDs fall back to the last label.
        best = 1
        for i in range(len(labels) - 1):
            candidate = ".".join(labels[i:])
            if candidate in self._suffixes:
                best = len(labels) - i
                break
        if best >= len(labels):
            raise DomainExtractionError(f"host is itself a public suffix: {host!r}")
        return ".".join(labels[-(best + 1):])


_SUFFIX_TABLE: _SuffixTable | None = None


def _suffix_table() -> _SuffixTable:
    global _SUFFIX_TABLE
    if _SUFFIX_TABLE is None:
        _SUFFIX_TABLE = _SuffixTable(_load_data_lines("public_suffixes.txt"))
    return _SUFFIX_TABLE


_URL_HOST_RE = re.compile(r"^(?:[a-zA-Z][a-zA-Z0-9+.-]*:)?//")


def extract_base_domain(url: str) -> str:
    """Reduce a URL to its registered base domain, lowercase.

    Subdomains, ports, paths, and query strings are stripped. Raises
    DomainExtractionError for inputs with no parseable host.
    """
    if not url or not url.strip():
        raise DomainExtractionError("empty URL")
    s = url.strip()
    if _URL_HOST_RE.match(s):
        s = s.split("//", 1)[1]
    elif "/" in s:
        s = s.split("/", 1)[0]
    s = s.split("/", 1)[0].split("?", 1)[0].split("#", 1)[0]
    if "@" in s:
        s = s.rsplit("@", 1)[1]
    s = s.split(":", 1)[0]
    if not s or " " in s or "." not in s:
        raise DomainExtractionError(f"no host in URL: {url!r}")
    return _suffix_table().base_domain(s)


@dataclass(frozen=True)
class DomainFilterList:
    """Set of base domains excluded from domain-based analyses."""

    blocked: frozenset[str]

    def __contains__(self, domain: str) -> bool:
        return domain in self.blocked

    @classmethod
    def from_file(cls, path) -> "DomainFilterList":
        with open(path, encoding="utf-8") as fh:
            entries = [
                ln.strip() for ln in fh
                if ln.strip() and not ln.strip().startswith("#")
            ]
        return cls(frozenset(e.lower() for e in entries))

    @classmethod
    def default(cls, lang: str) -> "DomainFilterList":
        name = "domain_filter_es.txt" if lang == "es" else "domain_filter_en.txt"
        return cls(frozenset(_load_data_lines(name)))


def filter_domains(urls: Iterable[str], filt: DomainFilterList) -> list[str]:
    """Extract base domains from `urls` and drop blocked ones.

    Order and multiplicity of surviving domains are preserved; URLs that
    fail extraction are skipped silently.
    """
    out = []
    for url in urls:
        try:
            dom = extract_base_domain(url)
        except DomainExtractionError:
            continue
        if dom not in filt:
            out.append(dom)
    return out


# ---------------------------------------------------------------------------
# Records and corpus


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    user_id: str
    created_at: datetime  # tz-aware UTC, second precision
    lang: str
    text: str
    hashtags: tuple[str, ...] = ()
    urls: tuple[str, ...] = ()
    like_count: int = 0
    retweet_count: int = 0
    quote_count: int = 0
    reply_count: int = 0
    is_retweet: bool = False

    def to_dict(self) -> dict:
        return {
            "tweet_id": self.tweet_id,
            "user_id": self.user_id,
            "created_at": self.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "lang": self.lang,
            "text": self.text,
            "hashtags": list(self.hashtags),
            "urls": list(self.urls),
            "like_count": self.like_count,
            "retweet_count": self.retweet_count,
            "quote_count": self.quote_count,
            "reply_count": self.reply_count,
            "is_retweet": self.is_retweet,
        }


def extract_hashtags(text: str) -> tuple[str, ...]:
    """'#'-prefixed word tokens (letters, digits, underscore), lowercased."""
    return tuple(m.group(1).lower() for m in _HASHTAG_RE.finditer(text))


class Corpus:
    """Immutable ordered collection of TweetRecord with language and user indices."""

    def __init__(self, records: Iterable[TweetRecord], skipped: int = 0):
        self.records: tuple[TweetRecord, ...] = tuple(records)
        self.skipped = skipped
        self.lang_index: dict[str, list[int]] = {}
        self.user_index: dict[str, list[int]] = {}
        for i, rec in enumerate(self.records):
            self.lang_index.setdefault(rec.lang, []).append(i)
            self.user_index.setdefault(rec.user_id, []).append(i)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TweetRecord]:
        return iter(self.records)

    def users(self) -> list[str]:
        return sorted(self.user_index)

    def records_for_user(self, user_id: str) -> list[TweetRecord]:
        return [self.records[i] for i in self.user_index.get(user_id, [])]

    def restricted_to(self, tweet_ids: set[str]) -> "Corpus":
        return Corpus(r for r in self.records if r.tweet_id in tweet_ids)

    def to_jsonl(self, fh: IO[str]) -> None:
        for rec in self.records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def _parse_timestamp(raw: str) -> datetime:
    s = raw.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def _record_from_obj(obj: dict, schema_map: dict[str, str]) -> TweetRecord:
    def get(name, default=None):
        return obj.get(schema_map.get(name, name), default)

    tweet_id = get("tweet_id")
    user_id = get("user_id")
    created = get("created_at")
    lang = get("lang")
    text = get("text")
    if not tweet_id or not user_id or not created or lang is None or text is None:
        raise ValueError("missing required field")
    hashtags = get("hashtags")
    if hashtags is None:
        tags = extract_hashtags(str(text))
    else:
        tags = tuple(
            str(h).lstrip("#").lower() for h in hashtags if str(h).lstrip("#")
        )
    urls = tuple(str(u) for u in (get("urls") or ()))
    counts = {}
    for name in _COUNT_FIELDS:
        val = int(get(name, 0) or 0)
        if val < 0:
            raise ValueError(f"negative {name}")
        counts[name] = val
    return TweetRecord(
        tweet_id=str(tweet_id),
        user_id=str(user_id),
        created_at=_parse_timestamp(str(created)),
        lang=str(lang).lower(),
        text=str(text),
        hashtags=tags,
        urls=urls,
        is_retweet=bool(get("is_retweet", False)),
        **counts,
    )


def parse_corpus(
    stream: IO[str],
    schema_config: dict[str, str] | None = None,
    horizon: datetime | None = None,
) -> Corpus:
    """Parse a line-delimited record stream into a Corpus.

    Malformed lines (bad JSON, missing required fields, unparseable
    timestamps, future-dated past `horizon`, duplicate tweet ids) are
    counted and skipped. If more than half of the non-empty lines are
    malformed the input is assumed to be the wrong format entirely and a
    SchemaError is raised.
    """
    schema_map = schema_config or {}
    records: list[TweetRecord] = []
    seen_ids: set[str] = set()
    skipped = 0
    total = 0
    for line in stream:
        line = line.strip()
        if not line:
            continue
        total += 1
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("record is not an object")
            rec = _record_from_obj(obj, schema_map)
            if rec.tweet_id in seen_ids:
                raise ValueError("duplicate tweet_id")
            if horizon is not None and rec.created_at > horizon:
                raise ValueError("future-dated record")
        except (ValueError, KeyError, TypeError) as exc:
            skipped += 1
            continue
        seen_ids.add(rec.tweet_id)
        records.append(rec)
    if total > 0 and skipped * 2 > total:
        raise SchemaError(
            f"{skipped} of {total} lines malformed; input is likely not in "
            "the documented record format"
        )
    return Corpus(records, skipped=skipped)


def balanced_sample(corpus: Corpus, lang_a: str, lang_b: str, seed: int) -> Corpus:
    """Restrict to two languages and downsample the larger one.

    The larger side is first clipped to the smaller side's time span, then
    uniformly sampled (seeded) down to the smaller side's record count.
    Output record order follows input order.
    """
    for lang in (lang_a, lang_b):
        if lang not in corpus.lang_index:
            raise ValueError(f"language {lang!r} not present in corpus")
    idx_a = corpus.lang_index[lang_a]
    idx_b = corpus.lang_index[lang_b]
    small, large = (idx_a, idx_b) if len(idx_a) <= len(idx_b) else (idx_b, idx_a)
    times = [corpus.records[i].created_at for i in small]
    lo, hi = min(times), max(times)
    large_in_span = [
        i for i in large if lo <= corpus.records[i].created_at <= hi
    ]
    target = min(len(small), len(large_in_span))
    rng = random.Random(seed)
    keep_small = small if target == len(small) else sorted(rng.sample(small, target))
    keep_large = (
        large_in_span
        if target == len(large_in_span)
        else sorted(rng.sample(large_in_span, target))
    )
    keep = set(keep_small) | set(keep_large)
    return Corpus(corpus.records[i] for i in sorted(keep))
