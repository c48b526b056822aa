from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import make_topic_corpus, merge_corpora  # noqa: E402

# The key-point group sizes used throughout: most popular 50, least 4.
NINE_KP_SIZES = (50, 30, 20, 15, 10, 8, 6, 5, 4)


@pytest.fixture
def nine_kp_corpus():
    return make_topic_corpus(NINE_KP_SIZES, topic_id="t0")


@pytest.fixture
def three_topic_corpus():
    return merge_corpora(
        make_topic_corpus(NINE_KP_SIZES, topic_id="t0"),
        make_topic_corpus(NINE_KP_SIZES, topic_id="t1", seed=11),
        make_topic_corpus(NINE_KP_SIZES, topic_id="t2", seed=13),
    )
