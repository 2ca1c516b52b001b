import pytest

import coannot

CHAIN = "A\tAlpha\t\nB\tBeta\tA\nC\tGamma\t\n"


def test_ontology_queries():
    o = coannot.Ontology.from_tsv(CHAIN)
    assert len(o) == 3
    assert o.ids() == ["A", "B", "C"]
    assert o.ancestors("B") == ["A"]
    assert o.expand(["B", "C"]) == ["A", "B", "C"]
    assert o.is_ancestor("A", "B")
    assert o.name("B") == "Beta"
    assert coannot.Ontology.parse(o.to_tsv()).to_tsv() == o.to_tsv()


def test_parse_errors_raise():
    with pytest.raises(coannot.Error, match="line 1"):
        coannot.Ontology.from_tsv("A\ta\tZ\n")


def test_obo_and_lexicon():
    obo = (
        "[Term]\nid: T:1\nname: leukocyte\n\n"
        "[Term]\nid: T:2\nname: leukemia cell\nis_a: T:1\nsynonym: \"AML\" EXACT []\n"
    )
    o = coannot.Ontology.from_obo(obo)
    lex = coannot.Lexicon.from_ontology(o)
    assert lex.match("Bone marrow, AML patient", o) == ["T:2"]
    assert lex.match("leukemia", o) == []
    assert coannot.tokenize("RNA-seq of liver.") == ["rna", "seq", "of", "liver"]


def test_resolve():
    o = coannot.Ontology.from_tsv(CHAIN)
    assert coannot.resolve("relation", {"B": 1.0}, {"A": 0.6}, o) == {"B": 1.0}
    assert coannot.resolve("union", {"B": 1.0}, {"C": 0.6}, o) == {"B": 1.0, "C": 0.6}
    assert coannot.resolve("standard", None, {"C": 0.6}, o) == {"C": 0.6}
    with pytest.raises(coannot.Error):
        coannot.resolve("best", {}, {}, o)


def test_annotate_and_evaluate():
    files = coannot.synth(n_samples=600, seed=3)
    o = coannot.Ontology.from_tsv(files["ontology"])
    lex = coannot.Lexicon.from_tsv(files["lexicon"], o)
    tsv = coannot.annotate(files["samples"], o, lex, iters=1)
    assert tsv == coannot.annotate(files["samples"], o, lex, iters=1)
    report = coannot.evaluate(tsv, files["gold"], o)
    assert 0.0 < report["auprc"] <= 1.0
    assert report["n_samples"] == 600


def test_no_supervision():
    o = coannot.Ontology.from_tsv(CHAIN)
    samples = '{"id": "x", "features": [1, 2], "text": "nothing"}\n'
    with pytest.raises(coannot.NoSupervisionError):
        coannot.annotate(samples, o, coannot.Lexicon.from_ontology(o))
