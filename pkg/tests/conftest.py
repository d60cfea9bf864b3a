import pytest

from ecst import LanguageId, parse
from ecst.frontends import ParsedFile

from corpus import PAIRS


def parse_pair(pair):
    """Parse both sides of a corpus pair; returns (k_tree, c_tree)."""
    k_tree = parse(pair.k_source, LanguageId.LANG_K, f"{pair.name}.mod")
    c_tree = parse(pair.c_source, LanguageId.LANG_C, f"{pair.name}.cls")
    return k_tree, c_tree


def corpus_files(lang=LanguageId.LANG_K):
    """Whole corpus as ParsedFile records in one language."""
    files = []
    for pair in PAIRS:
        if lang is LanguageId.LANG_K:
            path, source = f"{pair.name}.mod", pair.k_source
        else:
            path, source = f"{pair.name}.cls", pair.c_source
        files.append(ParsedFile(path=path, lang=lang, source=source,
                                tree=parse(source, lang, path)))
    return files


@pytest.fixture(scope="session")
def parsed_pairs():
    return [(pair, *parse_pair(pair)) for pair in PAIRS]


@pytest.fixture(scope="session")
def k_corpus():
    return corpus_files(LanguageId.LANG_K)


@pytest.fixture(scope="session")
def c_corpus():
    return corpus_files(LanguageId.LANG_C)
