"""Static SVG rendering of Newton diagrams."""

import math
from pathlib import Path
from typing import List, Optional, Tuple

from lxml import etree

from ..core.classifier import ClassificationResult, TypeIII, classify
from ..core.newton import WeightVector

SVG_NS = "http://www.w3.org/2000/svg"

WIDTH = 640
HEIGHT = 400
MARGIN = 48
STAR_RADIUS = 7.0


class NewtonDiagramRenderer:
    """Draw the lifted points ``(i, w_i)``, the lower hull and its marks.

    Marked points are drawn as stars, hull vertices as filled dots, points
    above the hull as hollow dots and hidden ties as dashed segments.
    """

    def __init__(self, width: int = WIDTH, height: int = HEIGHT) -> None:
        self.width = width
        self.height = height

    def render(self, w: WeightVector, result: Optional[ClassificationResult] = None) -> etree.Element:
        """Build the SVG element tree for a weight vector.

        Args:
            w: Weight vector to draw
            result: Classification of ``w`` (computed when omitted)

        Returns:
            Root ``svg`` element
        """
        if result is None:
            result = classify(w)
        self._scale(w)

        root = etree.Element(
            f"{{{SVG_NS}}}svg",
            {
                "width": str(self.width),
                "height": str(self.height),
                "viewBox": f"0 0 {self.width} {self.height}",
            },
            nsmap={None: SVG_NS},
        )
        title = etree.SubElement(root, f"{{{SVG_NS}}}title")
        title.text = f"Newton diagram of w = {w}"

        self._add_axis(root, w)
        self._add_hull(root, w, result)
        self._add_hidden_ties(root, w, result)
        self._add_points(root, w, result)
        self._add_caption(root, result)
        return root

    def write(self, root: etree.Element, output_path: Path) -> None:
        """Write the SVG document.

        Raises:
            ValueError: If the file cannot be written
        """
        try:
            etree.ElementTree(root).write(
                str(output_path), pretty_print=True, xml_declaration=True, encoding="utf-8"
            )
        except OSError as e:
            raise ValueError(f"Error writing SVG file: {e}") from e

    # -- geometry -----------------------------------------------------------

    def _scale(self, w: WeightVector) -> None:
        low, high = min(w), max(w)
        self._low = float(low)
        self._span = float(high - low) or 1.0
        self._step = (self.width - 2 * MARGIN) / max(w.n, 1)

    def _xy(self, i: int, value) -> Tuple[float, float]:
        x = MARGIN + i * self._step
        y = self.height - MARGIN - (float(value) - self._low) / self._span * (self.height - 3 * MARGIN)
        return round(x, 2), round(y, 2)

    # -- layers -------------------------------------------------------------

    def _add_axis(self, root: etree.Element, w: WeightVector) -> None:
        group = etree.SubElement(root, f"{{{SVG_NS}}}g", {"class": "axis", "stroke": "#999"})
        y = self.height - MARGIN / 2
        etree.SubElement(
            group,
            f"{{{SVG_NS}}}line",
            {"x1": str(MARGIN), "y1": str(y), "x2": str(self.width - MARGIN), "y2": str(y)},
        )
        for i in range(w.n + 1):
            x, _ = self._xy(i, w[i])
            label = etree.SubElement(
                group,
                f"{{{SVG_NS}}}text",
                {"x": str(x), "y": str(y + 16), "text-anchor": "middle", "stroke": "none"},
            )
            label.text = str(i)

    def _add_hull(self, root: etree.Element, w: WeightVector, result: ClassificationResult) -> None:
        group = etree.SubElement(
            root, f"{{{SVG_NS}}}g", {"class": "hull", "stroke": "#222", "stroke-width": "2"}
        )
        for cell in result.subdivision:
            x1, y1 = self._xy(cell.left, w[cell.left])
            x2, y2 = self._xy(cell.right, w[cell.right])
            etree.SubElement(
                group,
                f"{{{SVG_NS}}}line",
                {"x1": str(x1), "y1": str(y1), "x2": str(x2), "y2": str(y2)},
            )

    def _add_hidden_ties(
        self, root: etree.Element, w: WeightVector, result: ClassificationResult
    ) -> None:
        ties = sorted({cert.tie for cert in result.certificates if isinstance(cert, TypeIII)})
        if not ties:
            return
        group = etree.SubElement(
            root,
            f"{{{SVG_NS}}}g",
            {"class": "hidden-ties", "stroke": "#c0392b", "stroke-dasharray": "6 4"},
        )
        for j1, j2 in ties:
            x1, y1 = self._xy(j1, w[j1])
            x2, y2 = self._xy(j2, w[j2])
            etree.SubElement(
                group,
                f"{{{SVG_NS}}}line",
                {"x1": str(x1), "y1": str(y1), "x2": str(x2), "y2": str(y2)},
            )

    def _add_points(self, root: etree.Element, w: WeightVector, result: ClassificationResult) -> None:
        group = etree.SubElement(root, f"{{{SVG_NS}}}g", {"class": "points"})
        marked = {i for cell in result.subdivision for i in cell.marked}
        vertices = {i for cell in result.subdivision for i in cell.endpoints}
        for i, value in enumerate(w):
            x, y = self._xy(i, value)
            if i in marked:
                etree.SubElement(
                    group,
                    f"{{{SVG_NS}}}polygon",
                    {"class": "marked", "points": _star_points(x, y), "fill": "#222"},
                )
            elif i in vertices:
                etree.SubElement(
                    group,
                    f"{{{SVG_NS}}}circle",
                    {"class": "vertex", "cx": str(x), "cy": str(y), "r": "4", "fill": "#222"},
                )
            else:
                etree.SubElement(
                    group,
                    f"{{{SVG_NS}}}circle",
                    {
                        "class": "above",
                        "cx": str(x),
                        "cy": str(y),
                        "r": "4",
                        "fill": "none",
                        "stroke": "#222",
                    },
                )

    def _add_caption(self, root: etree.Element, result: ClassificationResult) -> None:
        caption = etree.SubElement(
            root, f"{{{SVG_NS}}}text", {"x": str(MARGIN), "y": str(MARGIN / 2), "class": "caption"}
        )
        if result.member:
            kinds = sorted({c.kind for c in result.certificates})
            caption.text = "member: type " + ", ".join(kinds)
        else:
            caption.text = f"not a member: {result.refusal_reason}"


def _star_points(x: float, y: float, radius: float = STAR_RADIUS) -> str:
    points: List[str] = []
    for k in range(10):
        r = radius if k % 2 == 0 else radius / 2.5
        angle = math.pi / 2 + k * math.pi / 5
        points.append(f"{x + r * math.cos(angle):.2f},{y - r * math.sin(angle):.2f}")
    return " ".join(points)
