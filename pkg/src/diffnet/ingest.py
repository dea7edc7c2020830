"""Tweet-record parsing, label tables, censoring and volume filters.

Input formats:

* Tweets file: one JSON object per line with fields ``tweet_id``,
  ``author_id``, ``timestamp`` (integer epoch seconds), ``article_id``, and
  optional ``retweet_of``, ``quote_of``, ``reply_to`` (author ids) plus
  ``mentions`` (list of author ids mentioned in the body, excluding the
  reply target).
* Labels file: CSV with header ``article_id,label,source,bias`` where
  label is ``D`` or ``M`` and bias is ``left``, ``right`` or empty
  (empty string means no bias annotation).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

CLASS_DISINFORMATION = "D"
CLASS_MAINSTREAM = "M"
CLASS_LABELS = (CLASS_DISINFORMATION, CLASS_MAINSTREAM)

BIAS_LEFT = "left"
BIAS_RIGHT = "right"
BIAS_UNLABELED = ""
BIAS_VALUES = (BIAS_LEFT, BIAS_RIGHT, BIAS_UNLABELED)

LABELS_HEADER = ["article_id", "label", "source", "bias"]


class CorpusFormatError(ValueError):
    """Raised when an input file is structurally unusable."""


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    author_id: str
    timestamp: int
    article_id: str
    retweet_of: Optional[str] = None
    quote_of: Optional[str] = None
    reply_to: Optional[str] = None
    mentions: tuple[str, ...] = ()

    def interaction_free(self) -> bool:
        """True for a pure tweet: no retweet, quote, reply or mention."""
        return (
            self.retweet_of is None
            and self.quote_of is None
            and self.reply_to is None
            and not self.mentions
        )


@dataclass(frozen=True)
class ArticleLabel:
    article_id: str
    class_label: str
    source: str = ""
    bias: str = BIAS_UNLABELED

    def __post_init__(self):
        if self.class_label not in CLASS_LABELS:
            raise CorpusFormatError(
                f"label for {self.article_id!r} must be D or M, got {self.class_label!r}"
            )
        if self.bias not in BIAS_VALUES:
            raise CorpusFormatError(
                f"bias for {self.article_id!r} must be left/right/empty, got {self.bias!r}"
            )


@dataclass(frozen=True)
class ArticleCascade:
    """All collected tweets of one article, time-ordered."""

    article_id: str
    tweets: tuple[TweetRecord, ...]
    label: ArticleLabel

    @staticmethod
    def build(article_id: str, tweets: Iterable[TweetRecord], label: ArticleLabel):
        ordered = sorted(tweets, key=lambda t: (t.timestamp, t.tweet_id))
        for t in ordered:
            if t.article_id != article_id:
                raise ValueError(
                    f"tweet {t.tweet_id!r} belongs to {t.article_id!r}, not {article_id!r}"
                )
        return ArticleCascade(article_id, tuple(ordered), label)


@dataclass
class ParseResult:
    records: list[TweetRecord] = field(default_factory=list)
    malformed: int = 0
    duplicates: int = 0


def _normalize_mentions(raw, reply_to: Optional[str]) -> tuple[str, ...]:
    # dedup preserving order; the reply target never doubles as a mention
    seen = set()
    out = []
    for m in raw:
        if not isinstance(m, str) or not m:
            raise ValueError("mentions must be nonempty strings")
        if m == reply_to or m in seen:
            continue
        seen.add(m)
        out.append(m)
    return tuple(out)


def _record_from_obj(obj) -> TweetRecord:
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    try:
        tweet_id = obj["tweet_id"]
        author_id = obj["author_id"]
        timestamp = obj["timestamp"]
        article_id = obj["article_id"]
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]}") from None
    for name, value in (
        ("tweet_id", tweet_id),
        ("author_id", author_id),
        ("article_id", article_id),
    ):
        if not isinstance(value, str) or not value:
            raise ValueError(f"{name} must be a nonempty string")
    if isinstance(timestamp, bool) or not isinstance(timestamp, int) or timestamp <= 0:
        raise ValueError("timestamp must be a positive integer")
    optional = {}
    for key in ("retweet_of", "quote_of", "reply_to"):
        value = obj.get(key)
        if value is not None and (not isinstance(value, str) or not value):
            raise ValueError(f"{key} must be a nonempty string when present")
        optional[key] = value
    mentions_raw = obj.get("mentions", [])
    if not isinstance(mentions_raw, list):
        raise ValueError("mentions must be a list")
    mentions = _normalize_mentions(mentions_raw, optional["reply_to"])
    return TweetRecord(
        tweet_id=tweet_id,
        author_id=author_id,
        timestamp=timestamp,
        article_id=article_id,
        retweet_of=optional["retweet_of"],
        quote_of=optional["quote_of"],
        reply_to=optional["reply_to"],
        mentions=mentions,
    )


def parse_records(lines: Iterable[str]) -> ParseResult:
    """Parse line-delimited tweet records.

    Malformed lines (bad JSON, missing or invalid fields) are counted and
    skipped. Duplicate tweet_ids keep the first occurrence. Blank lines are
    ignored entirely. Raises CorpusFormatError when more than half of the
    non-blank lines are malformed.
    """
    result = ParseResult()
    seen_ids: set[str] = set()
    considered = 0
    for line in lines:
        if not line.strip():
            continue
        considered += 1
        try:
            record = _record_from_obj(json.loads(line))
        except (ValueError, TypeError):
            result.malformed += 1
            continue
        if record.tweet_id in seen_ids:
            result.duplicates += 1
            continue
        seen_ids.add(record.tweet_id)
        result.records.append(record)
    if considered and 2 * result.malformed > considered:
        raise CorpusFormatError(
            f"{result.malformed} of {considered} lines malformed"
        )
    return result


def record_to_json(record: TweetRecord) -> str:
    """One-line JSON form; optional fields are omitted when unset."""
    obj = {
        "tweet_id": record.tweet_id,
        "author_id": record.author_id,
        "timestamp": record.timestamp,
        "article_id": record.article_id,
    }
    for key in ("retweet_of", "quote_of", "reply_to"):
        value = getattr(record, key)
        if value is not None:
            obj[key] = value
    if record.mentions:
        obj["mentions"] = list(record.mentions)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def load_tweets_file(path) -> ParseResult:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_records(fh)
    except OSError as exc:
        raise CorpusFormatError(f"cannot read tweets file: {exc}") from exc


def write_tweets_file(path, records: Iterable[TweetRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record_to_json(record))
            fh.write("\n")


def parse_labels(rows: Iterable[str]) -> dict[str, ArticleLabel]:
    reader = csv.reader(rows)
    try:
        header = next(reader)
    except StopIteration:
        raise CorpusFormatError("labels file is empty") from None
    if [h.strip() for h in header] != LABELS_HEADER:
        raise CorpusFormatError(
            f"labels header must be {','.join(LABELS_HEADER)}"
        )
    labels: dict[str, ArticleLabel] = {}
    for row in reader:
        if not row:
            continue
        if len(row) != 4:
            raise CorpusFormatError(f"labels row has {len(row)} fields: {row!r}")
        article_id, label, source, bias = (f.strip() for f in row)
        if article_id in labels:
            raise CorpusFormatError(f"duplicate label row for {article_id!r}")
        labels[article_id] = ArticleLabel(article_id, label, source, bias)
    return labels


def load_labels_file(path) -> dict[str, ArticleLabel]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return parse_labels(fh)
    except OSError as exc:
        raise CorpusFormatError(f"cannot read labels file: {exc}") from exc


def write_labels_file(path, labels: Iterable[ArticleLabel]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LABELS_HEADER)
        for lab in sorted(labels, key=lambda l: l.article_id):
            writer.writerow([lab.article_id, lab.class_label, lab.source, lab.bias])


def group_cascades(
    records: Iterable[TweetRecord], labels: dict[str, ArticleLabel]
) -> tuple[list[ArticleCascade], int]:
    """Group records by article, attaching labels.

    Records whose article has no label row are skipped; the second return
    value counts them. Cascades come back sorted by article_id.
    """
    buckets: dict[str, list[TweetRecord]] = {}
    unlabeled = 0
    for record in records:
        if record.article_id not in labels:
            unlabeled += 1
            continue
        buckets.setdefault(record.article_id, []).append(record)
    cascades = [
        ArticleCascade.build(aid, tweets, labels[aid])
        for aid, tweets in sorted(buckets.items())
    ]
    return cascades, unlabeled


def apply_censoring(
    cascades: Iterable[ArticleCascade], collection_start: int, window: int
) -> list[ArticleCascade]:
    """Keep tweets with collection_start <= timestamp <= collection_start + window.

    Articles left with no tweets disappear from the output.
    """
    if window <= 0:
        raise ValueError("window must be positive")
    end = collection_start + window
    out = []
    for cascade in cascades:
        kept = tuple(
            t for t in cascade.tweets if collection_start <= t.timestamp <= end
        )
        if kept:
            out.append(replace(cascade, tweets=kept))
    return out


def filter_min_tweets(
    cascades: Iterable[ArticleCascade], min_count: int = 50
) -> list[ArticleCascade]:
    """Keep articles with at least min_count tweets."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    return [c for c in cascades if len(c.tweets) >= min_count]
