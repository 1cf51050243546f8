"""Ingesting a raw corpus: parsing, base-domain extraction, domain
filtering, and balanced two-language sampling.

Run: python3 demos/01_ingest_and_domains.py
"""

import io
import json

from coordnet import (
    DomainFilterList,
    balanced_sample,
    extract_base_domain,
    filter_domains,
    parse_corpus,
)

RAW = [
    {"tweet_id": "1", "user_id": "alice", "created_at": "2024-06-01T10:00:00Z",
     "lang": "en", "text": "read this #election2024",
     "urls": ["https://www.foxnews.com/politics/story"]},
    {"tweet_id": "2", "user_id": "bob", "created_at": "2024-06-01T10:30:00Z",
     "lang": "es", "text": "mira esto #eleccion",
     "urls": ["https://youtu.be/abc", "https://cnn.com/x"]},
    {"tweet_id": "3", "user_id": "carol", "created_at": "2024-06-01T11:00:00Z",
     "lang": "en", "text": "no link here"},
    {"tweet_id": "4", "user_id": "eva", "created_at": "2024-06-01T09:30:00Z",
     "lang": "es", "text": "hola #eleccion"},
    {"tweet_id": "5", "user_id": "frank", "created_at": "2024-06-01T11:30:00Z",
     "lang": "en", "text": "late reply"},
    {"tweet_id": "2", "user_id": "dave", "created_at": "2024-06-01T11:30:00Z",
     "lang": "en", "text": "duplicate id, will be skipped"},
]

stream = io.StringIO("\n".join(json.dumps(r) for r in RAW))
corpus = parse_corpus(stream)
print(f"parsed {len(corpus)} records, skipped {corpus.skipped}")
for rec in corpus:
    print(f"  {rec.tweet_id}: user={rec.user_id} lang={rec.lang} "
          f"hashtags={rec.hashtags}")

print("\nbase-domain extraction strips subdomains/paths:")
for url in ("https://www.foxnews.com/politics/story",
            "https://news.bbc.co.uk/article", "https://youtu.be/abc"):
    print(f"  {url} -> {extract_base_domain(url)}")

print("\nthe bundled filter list drops platform/shortener domains:")
filt = DomainFilterList.default("en")
urls = ["https://www.foxnews.com/a", "https://youtu.be/x", "https://cnn.com/b"]
print(f"  {urls} -> {filter_domains(urls, filt)}")

balanced = balanced_sample(corpus, "en", "es", seed=0)
langs = sorted((r.lang, r.tweet_id) for r in balanced)
print(f"\nbalanced en/es sample keeps equal counts: {langs}")
