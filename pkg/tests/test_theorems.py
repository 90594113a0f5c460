"""
Tests for the verification chain.
"""

from relconv.generators.corpus import non_product, strongly_split, z4z2
from relconv.report import Status
from relconv.runner import theorems


def _counting(monkeypatch, name):
    calls = []
    original = getattr(theorems, name)

    def counted(*args, **kwargs):
        calls.append(args)
        return original(*args, **kwargs)

    monkeypatch.setattr(theorems, name, counted)
    return calls


class TestVerify:
    """Tests for verify."""

    def test_strongly_split_is_classified_once(self, monkeypatch):
        """One classification and one product table serve the whole chain."""
        classified = _counting(monkeypatch, "is_strongly_split")
        tables = _counting(monkeypatch, "relational_product_table")
        report = theorems.verify(z4z2(), strongly_split(), threads=1)
        assert report.passed
        assert len(classified) == 1
        assert len(tables) == 1
        statuses = {line.name: line.status for line in report.lines}
        assert statuses["strongly-split"] is Status.PASS
        assert statuses["split-factorization"] is Status.PASS

    def test_non_product_skips_the_factorization(self):
        """Without a strong splitting the factorization lemma is not reported."""
        report = theorems.verify(z4z2(), non_product(), threads=1)
        names = [line.name for line in report.lines]
        assert "split-factorization" not in names
        assert dict((line.name, line.status) for line in report.lines)["strongly-split"] is Status.NOTE
