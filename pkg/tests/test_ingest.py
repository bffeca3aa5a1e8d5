import random

import pytest
from hypothesis import given, strategies as st

from tweetcorpus.errors import InvalidEncoding, MalformedRecord
from tweetcorpus.ingest import (
    DedupState,
    IngestStats,
    RawTweet,
    dedup,
    parse_record,
    serialize_record,
)


def test_parse_basic_fields():
    t = parse_record('{"id":1,"text":"salut","lang":"ro"}')
    assert t == RawTweet(id=1, text="salut", created_at=0, declared_lang="ro")


def test_parse_missing_text_is_malformed():
    with pytest.raises(MalformedRecord):
        parse_record('{"id":2}')


def test_parse_timestamp():
    t = parse_record('{"id":3,"text":"a","created_at":"2008-01-01T00:00:00Z"}')
    assert t.created_at == 1199145600


@pytest.mark.parametrize("line", [
    "not json",
    '{"text":"a"}',
    '{"id":-1,"text":"a"}',
    '{"id":1.5,"text":"a"}',
    '{"id":"abc","text":"a"}',
    '{"id":1,"text":""}',
    '{"id":1,"text":42}',
    '{"id":1,"text":"a","created_at":"yesterday"}',
    '{"id":true,"text":"a"}',
    '[1,2]',
])
def test_parse_rejects_malformed(line):
    with pytest.raises(MalformedRecord):
        parse_record(line)


def test_parse_decimal_string_id():
    assert parse_record('{"id":"99","text":"a"}').id == 99


def test_parse_invalid_utf8_bytes():
    with pytest.raises(InvalidEncoding):
        parse_record(b'{"id":1,"text":"\xff\xfe"}')


@given(
    st.integers(min_value=0, max_value=2**64 - 1),
    st.text(min_size=1).filter(lambda s: s.strip()),
    st.integers(min_value=0, max_value=2**31),
    st.one_of(st.none(), st.sampled_from(["ro", "en", "und"])),
)
def test_serialize_parse_roundtrip(tweet_id, text, created_at, lang):
    tweet = RawTweet(tweet_id, text, created_at, lang)
    assert parse_record(serialize_record(tweet)) == tweet


def test_dedup_id_collision_keeps_first():
    stream = [RawTweet(1, "a"), RawTweet(1, "b")]
    assert list(dedup(iter(stream))) == [RawTweet(1, "a")]


def test_dedup_text_collision_is_canonicalized():
    stream = [RawTweet(1, "Salut  lume"), RawTweet(2, "salut lume")]
    assert list(dedup(iter(stream))) == [RawTweet(1, "Salut  lume")]


def test_dedup_all_distinct_retained():
    rng = random.Random(11)
    tweets = [RawTweet(i, f"text unic {i} {rng.random()}") for i in range(1000)]
    assert list(dedup(iter(tweets))) == tweets


def oracle_dedup(tweets):
    """Quadratic pairwise comparison: keep a tweet iff it matches no
    previously kept tweet on id or canonical text."""
    def canon(text):
        return " ".join(text.lower().split())

    kept = []
    for tweet in tweets:
        if any(k.id == tweet.id or canon(k.text) == canon(tweet.text) for k in kept):
            continue
        kept.append(tweet)
    return kept


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_dedup_matches_quadratic_oracle(seed):
    rng = random.Random(seed)
    pool = [RawTweet(i, f"mesaj numarul {i % 40} varianta {i % 7}") for i in range(60)]
    stream = [rng.choice(pool) for _ in range(500)]
    # sprinkle case/whitespace variants that must still collide
    stream += [RawTweet(1000 + i, t.text.upper() + "  ") for i, t in enumerate(stream[:30])]
    rng.shuffle(stream)
    assert list(dedup(iter(stream))) == oracle_dedup(stream)


def test_dedup_stats_conservation():
    stats = IngestStats()
    stream = [RawTweet(1, "a b"), RawTweet(1, "c"), RawTweet(2, "A  b"), RawTweet(3, "x")]
    out = list(dedup(iter(stream), stats=stats))
    assert len(out) == 2
    assert stats.emitted == 2
    assert stats.duplicates_id == 1
    assert stats.duplicates_text == 1
    assert stats.emitted + stats.duplicates_id + stats.duplicates_text == len(stream)


def test_dedup_is_streaming():
    # consuming one element must not exhaust the source
    def source():
        yield RawTweet(1, "a")
        yield RawTweet(2, "b")
        raise AssertionError("pulled too far")

    gen = dedup(source())
    assert next(gen).id == 1


def test_dedup_state_growth_matches_unique_count():
    state = DedupState()
    tweets = [RawTweet(i, f"unic {i}") for i in range(100)]
    list(dedup(iter(tweets + tweets), state=state))
    assert len(state.seen_ids) == 100
    assert len(state.seen_text_hashes) == 100
