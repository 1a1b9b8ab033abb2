"""Integration tests for the complete tropsev workflow."""

import json
import random

import pytest
from tropsev.core.arith import CoeffRing
from tropsev.core.classifier import classify, enumerate_cones, sample_interior_point
from tropsev.core.newton import WeightVector
from tropsev.core.oracle import (
    RootSample,
    canonical_form,
    cross_validate,
    exceptional_smoke,
    forward_sample,
    random_root_sample,
)
from tropsev.core.puiseux import PuiseuxTrunc
from tropsev.core.trop_kernel import (
    ValMatrix,
    in_trop_kernel,
    in_trop_kernel_via_circuits,
    severi_matrix,
)
from tropsev.core.witness import build_witness, verify_witness
from tropsev.errors import NonGenericWeight, PrecisionExhausted
from tropsev.utils.file_utils import get_output_filename
from tropsev.utils.serialization import decode_witness, encode_witness
from tropsev.utils.svg import NewtonDiagramRenderer

RING = CoeffRing.rationals()


class TestIntegration:
    """Integration tests from weight vector to verified witness."""

    @pytest.mark.parametrize(
        "weights,kind",
        [
            ([2, 1, 0, 0, 0, 1], "I"),
            ([2, 0, 0, 1, 0, 0], "II"),
            ([0, 1, 0, 2, 0, 3, 0], "II-exceptional"),
            ([2, 0, 1, 0, 1, 0], "III"),
        ],
    )
    def test_classify_witness_verify_workflow(self, tmp_path, weights, kind):
        """Test classification, witness files and diagrams for each type."""
        w = WeightVector.of(weights)

        result = classify(w)
        assert result.member
        assert result.interior_certificates()

        witness = build_witness(w)
        assert witness.kind == kind

        # Write the witness document
        document = get_output_filename(tmp_path / "witness", suffix=".json")
        document.write_text(json.dumps(encode_witness(witness), indent=2))
        assert document.exists()

        # Read it back and verify from the file alone
        restored = decode_witness(json.loads(document.read_text()))
        report = verify_witness(restored.weight, restored)
        assert report.passed, report.failed()

        # Draw the diagram next to it
        diagram = get_output_filename(tmp_path / "witness")
        renderer = NewtonDiagramRenderer()
        renderer.write(renderer.render(w, result), diagram)
        assert diagram.suffix == ".svg"
        assert "<svg" in diagram.read_text()

    def test_forward_sample_in_tropical_kernel(self):
        """Test that a forward sample lies in the tropical kernel of its node conditions."""
        node_b = ((0, RING.element(-1)), (1, RING.element(-1)))
        sample = RootSample(RING, node_b, (((2, RING.one()),),), ((0, RING.one()),))
        forward = forward_sample(sample)

        b = PuiseuxTrunc.from_terms(RING, [(0, -1), (1, -1)], 20)
        M = severi_matrix(b, 5)
        assert in_trop_kernel(M, list(forward.weight)).member
        assert in_trop_kernel_via_circuits(M, list(forward.weight)).member
        assert classify(forward.weight).of_kind("III")

    def test_witness_node_in_tropical_kernel(self):
        """Test that the weight of a type I witness is in the tropical kernel for its node."""
        w = WeightVector.of([2, 1, 0, 0, 0, 1])
        witness = build_witness(w)

        M = severi_matrix(witness.b, 5)
        assert in_trop_kernel(M, list(w)).member

    @pytest.mark.parametrize("n", [5, 6])
    def test_interior_points_have_witnesses(self, n):
        """Test witnesses at sampled interior points of every cone."""
        rng = random.Random(n)
        built = 0
        for cone in enumerate_cones(n):
            w = sample_interior_point(cone.certificate, n, rng)
            try:
                witness = build_witness(w, cone.certificate)
            except NonGenericWeight:
                # Type II points where the minimizer of the added index is tied
                continue
            report = verify_witness(w, witness)
            assert report.passed, (cone.certificate, report.failed())
            built += 1

        type_one = sum(1 for cone in enumerate_cones(n) if cone.certificate.kind == "I")
        assert built >= type_one


@pytest.mark.slow
class TestAcceptanceSweeps:
    """Full-size sweeps, deselected by default."""

    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
    def test_round_trip_per_cone(self, n):
        """Test witnesses at many interior points of every cone."""
        rng = random.Random(100 + n)
        cones = enumerate_cones(n)
        for _ in range(200 // len(cones) + 1):
            for cone in cones:
                w = sample_interior_point(cone.certificate, n, rng)
                try:
                    witness = build_witness(w, cone.certificate)
                except NonGenericWeight:
                    continue
                assert verify_witness(w, witness).passed, (cone.certificate, w)

    def test_dual_paths_on_random_matrices(self):
        """Test minors and circuits on 200 random 3 x 6 rational matrices."""
        rng = random.Random(10)
        checked = 0
        while checked < 200:
            rows = [[rng.randint(-3, 3) for _ in range(6)] for _ in range(3)]
            M = ValMatrix.constant(rows)
            w = [rng.randint(-3, 3) for _ in range(6)]
            try:
                expected = in_trop_kernel(M, w).member
            except ValueError:
                # not of full row rank
                continue
            assert in_trop_kernel_via_circuits(M, w).member == expected, (rows, w)
            checked += 1

    @pytest.mark.parametrize("n,samples", [(5, 1000), (7, 500)])
    def test_forward_soundness(self, n, samples):
        """Test that every forward sample is accepted."""
        report = cross_validate(n, samples, seed=n)
        assert report.ok, report.failures[:3]

    def test_negative_controls(self):
        """Test that no sample lands on an exceptional or broken-tie weight."""
        assert exceptional_smoke(4, 10_000, seed=1).ok
        broken_tie = canonical_form(WeightVector.of([2, 0, 1, 0, 2, 0]))
        rng = random.Random(2)
        for _ in range(2000):
            sample = random_root_sample(5, rng)
            try:
                forward = forward_sample(sample)
            except PrecisionExhausted:
                continue
            assert canonical_form(forward.weight) != broken_tie
