"""Profile-text labels: tokenize member descriptions and rank terms by TF-IDF across communities."""
from __future__ import annotations

import os
import re
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Mapping, Sequence, Tuple

from sklearn.feature_extraction.text import TfidfVectorizer

from .errors import InvalidParameterError
from .graph import VertexMeta

STOPWORDS_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data', 'stopwords.txt')

# Unicode letters and digits; underscores split tokens
_TOKEN = re.compile(r"[^\W_]+")
MIN_TOKEN_LENGTH = 3


@lru_cache(maxsize=None)
def load_stopwords(path: str = STOPWORDS_PATH) -> FrozenSet[str]:
    with open(path, 'r', encoding='utf-8') as f:
        return frozenset(line.strip().lower() for line in f if line.strip() and not line.startswith('#'))


def tokenize(text: str, stopwords: FrozenSet[str] | None = None) -> List[str]:
    """Lowercase word tokens of length >= 3 with stopwords removed. No stemming."""
    stopwords = load_stopwords() if stopwords is None else stopwords
    return [t for t in _TOKEN.findall(text.lower()) if len(t) >= MIN_TOKEN_LENGTH and t not in stopwords]


def community_tokens(members: Iterable[str], meta: Mapping[str, VertexMeta]) -> List[str]:
    """All description tokens of a community, members visited in sorted order."""
    tokens: List[str] = []
    for v in sorted(members):
        vm = meta.get(v)
        if vm is not None and vm.description:
            tokens.extend(tokenize(vm.description))
    return tokens


def label_community(
    members: Iterable[str],
    meta: Mapping[str, VertexMeta],
    corpus: Sequence[Sequence[str]],
    top_k: int,
) -> List[Tuple[str, float]]:
    """Top ``top_k`` TF-IDF terms for a community, treating each community as one document.

    ``corpus`` holds every community's token list; the community's own tokens
    are added when missing so its terms have a document frequency.
    """
    if top_k < 1:
        raise InvalidParameterError('top_k', top_k, 'must be >= 1')
    doc = community_tokens(members, meta)
    if not doc:
        return []
    documents = [list(d) for d in corpus]
    if doc not in documents:
        documents.append(doc)

    vectorizer = TfidfVectorizer(analyzer=lambda tokens: tokens)
    vectorizer.fit(documents)
    row = vectorizer.transform([doc]).toarray()[0]
    terms = vectorizer.get_feature_names_out()
    scored = [(str(terms[i]), float(row[i])) for i in row.nonzero()[0]]
    scored.sort(key=lambda tw: (-round(tw[1], 12), tw[0]))
    return scored[:top_k]
