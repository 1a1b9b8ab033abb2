"""Tests for Newton diagram rendering."""

from lxml import etree
from tropsev.core.newton import WeightVector
from tropsev.utils.svg import SVG_NS, NewtonDiagramRenderer


def _with_class(root, tag, name):
    return [el for el in root.iter(f"{{{SVG_NS}}}{tag}") if el.get("class") == name]


class TestNewtonDiagramRenderer:
    """Test the SVG element tree."""

    def setup_method(self):
        """Set up test fixtures."""
        self.renderer = NewtonDiagramRenderer()

    def test_type_one_points(self):
        """Test stars at the marks and dots at the hull vertices."""
        root = self.renderer.render(WeightVector.of([2, 1, 0, 0, 0, 1]))
        assert len(_with_class(root, "polygon", "marked")) == 2
        assert len(_with_class(root, "circle", "vertex")) == 4
        assert not _with_class(root, "circle", "above")
        assert not _with_class(root, "g", "hidden-ties")
        assert _with_class(root, "text", "caption")[0].text == "member: type I"

    def test_hidden_tie(self):
        """Test the dashed segment between the tied points."""
        root = self.renderer.render(WeightVector.of([2, 0, 1, 0, 1, 0]))
        ties = _with_class(root, "g", "hidden-ties")
        assert len(ties) == 1
        assert len(list(ties[0])) == 1
        assert len(_with_class(root, "circle", "above")) == 2
        assert _with_class(root, "text", "caption")[0].text == "member: type III"

    def test_refused_caption(self):
        """Test the caption of a weight outside the variety."""
        root = self.renderer.render(WeightVector.of([0, 1, 3, 6, 10]))
        caption = _with_class(root, "text", "caption")[0].text
        assert caption.startswith("not a member")
        assert not _with_class(root, "polygon", "marked")

    def test_hull_segments(self):
        """Test one hull line per cell."""
        root = self.renderer.render(WeightVector.of([2, 1, 0, 0, 0, 1]))
        hull = _with_class(root, "g", "hull")[0]
        assert len(list(hull)) == 3

    def test_flat_weight(self):
        """Test that a constant weight vector renders."""
        root = self.renderer.render(WeightVector.of([0, 0, 0, 0, 0]))
        assert len(_with_class(root, "polygon", "marked")) == 3

    def test_write(self, tmp_path):
        """Test writing the document to disk."""
        output = tmp_path / "diagram.svg"
        self.renderer.write(self.renderer.render(WeightVector.of([2, 1, 0, 0, 0, 1])), output)
        parsed = etree.parse(str(output)).getroot()
        assert parsed.tag == f"{{{SVG_NS}}}svg"
        assert parsed.get("width") == "640"

    def test_written_document(self, tmp_path):
        """Test the XML declaration and caption of a written document."""
        output = tmp_path / "diagram.svg"
        self.renderer.write(self.renderer.render(WeightVector.of([2, 0, 0, 1, 0, 0])), output)
        data = output.read_bytes()
        assert data.startswith(b"<?xml")
        assert b"member: type II" in data
