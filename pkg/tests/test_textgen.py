"""Pseudo text: determinism, length bounds, vocabulary closure."""

import pytest

from synthpages.sampler import RngSeed
from synthpages.textgen import name_pool, pseudo_authors, pseudo_text, vocabulary


def test_deterministic():
    a = pseudo_text("body", 120, RngSeed(4, 0))
    b = pseudo_text("body", 120, RngSeed(4, 0))
    assert a.tokens == b.tokens


def test_different_streams_differ():
    a = pseudo_text("body", 120, RngSeed(4, 0))
    b = pseudo_text("body", 120, RngSeed(4, 1))
    assert a.tokens != b.tokens


@pytest.mark.parametrize("n", [5, 40, 200, 1000])
def test_token_count_within_twenty_percent(n):
    block = pseudo_text("body", n, RngSeed(8, n))
    assert 0.8 * n <= len(block.tokens) <= 1.2 * n


def test_vocabulary_closure():
    vocab = set(vocabulary())
    block = pseudo_text("body", 400, RngSeed(2, 9))
    for tok in block.tokens:
        bare = tok.strip(".,").lower()
        assert bare in vocab, tok


def test_title_has_no_sentence_periods():
    block = pseudo_text("title", 8, RngSeed(3, 1))
    assert not any(t.endswith(".") for t in block.tokens)
    # title case on significant words
    assert block.tokens[0][0].isupper()


def test_body_capitalized_sentences():
    toks = pseudo_text("body", 150, RngSeed(6, 2)).tokens
    assert toks[0][0].isupper()
    for prev, cur in zip(toks, toks[1:]):
        if prev.endswith("."):
            assert cur[0].isupper()


def test_authors_bounds():
    with pytest.raises(ValueError):
        pseudo_authors(0, None, RngSeed(0))
    with pytest.raises(ValueError):
        pseudo_authors(13, None, RngSeed(0))


def test_authors_line_per_author():
    block = pseudo_authors(4, None, RngSeed(5, 7))
    assert block.tokens.count("\n") >= 3  # at least a separator per author


def test_authors_deterministic():
    a = pseudo_authors(3, None, RngSeed(5, 7))
    b = pseudo_authors(3, None, RngSeed(5, 7))
    assert a.tokens == b.tokens


def test_name_pool_parsed_pairs():
    pool = name_pool()
    assert len(pool) >= 20
    for name, affiliation in pool:
        assert name and affiliation
        assert "|" not in name and "|" not in affiliation


def test_custom_vocab(tmp_path):
    path = tmp_path / "tiny.txt"
    path.write_text("alpha\nbeta\ngamma\n")
    block = pseudo_text("body", 30, RngSeed(1, 1), vocab_path=str(path))
    for tok in block.tokens:
        assert tok.strip(".,").lower() in {"alpha", "beta", "gamma"}
