"""Unit tests for the loop program representation and its JSON documents."""

from __future__ import annotations

import json

import numpy as np
import pytest

from ellipcert.program.io import (
    parse_matrix,
    parse_program,
    serialize_program,
)
from ellipcert.program.ir import (
    CopyToY,
    Mac,
    Program,
    ResetX,
    canonical_program,
    instruction_matrix,
    loop_matrix,
    net_loop_map,
    state_labels,
    x_slot,
    y_slot,
)
from ellipcert.shared.exceptions import InvalidInputError, ProgramParseError
from ellipcert.simulation.interpreter import execute
from tests.conftest import REFERENCE_A


class TestCanonicalProgram:
    def test_scalar(self) -> None:
        p = canonical_program([[0.7]])
        assert p.body == [CopyToY(i=1), ResetX(i=1), Mac(i=1, j=1, a=0.7)]
        assert p.init_box == [1.0]

    def test_reference_order(self) -> None:
        p = canonical_program(REFERENCE_A)
        assert p.body == [
            CopyToY(i=1),
            ResetX(i=1),
            CopyToY(i=2),
            ResetX(i=2),
            Mac(i=1, j=1, a=0.0),
            Mac(i=1, j=2, a=1.0),
            Mac(i=2, j=1, a=-0.1),
            Mac(i=2, j=2, a=-0.2),
        ]

    def test_row_major_macs(self, rng: np.random.Generator) -> None:
        a = rng.standard_normal((3, 3))
        p = canonical_program(a)
        assert len(p.body) == 6 + 9
        expected = [(i, j) for i in range(1, 4) for j in range(1, 4)]
        macs = [instr for instr in p.body if isinstance(instr, Mac)]
        assert [(m.i, m.j) for m in macs] == expected
        assert [m.a for m in macs] == [float(a[i - 1, j - 1]) for i, j in expected]

    def test_rejects_non_square(self) -> None:
        with pytest.raises(InvalidInputError, match="square"):
            canonical_program(np.ones((2, 3)))

    def test_rejects_nan(self) -> None:
        with pytest.raises(InvalidInputError, match="non-finite"):
            canonical_program([[float("nan")]])

    def test_custom_box(self) -> None:
        p = canonical_program(REFERENCE_A, [2.0, 0.5])
        np.testing.assert_array_equal(p.box, [2.0, 0.5])

    def test_rejects_negative_box(self) -> None:
        with pytest.raises(InvalidInputError):
            canonical_program(REFERENCE_A, [1.0, -1.0])


class TestInstructionMatrix:
    def test_copy(self) -> None:
        np.testing.assert_array_equal(
            instruction_matrix(CopyToY(i=1), 2),
            [[0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        )

    def test_reset(self) -> None:
        expected = np.eye(4)
        expected[2, 2] = 0.0
        np.testing.assert_array_equal(instruction_matrix(ResetX(i=1), 2), expected)

    def test_mac(self) -> None:
        expected = np.eye(4)
        expected[3, 0] = 0.25
        np.testing.assert_array_equal(
            instruction_matrix(Mac(i=2, j=1, a=0.25), 2), expected
        )

    def test_index_out_of_range(self) -> None:
        with pytest.raises(InvalidInputError, match="out of range"):
            instruction_matrix(ResetX(i=3), 2)

    def test_matches_assignment_semantics(self, rng: np.random.Generator) -> None:
        n = 3
        instructions = [
            CopyToY(i=2),
            ResetX(i=3),
            Mac(i=1, j=3, a=-0.8),
            Mac(i=2, j=2, a=1.7),
        ]
        for instr in instructions:
            states = rng.standard_normal((5, 2 * n))
            expected = states @ instruction_matrix(instr, n).T
            execute(instr, states, n)
            np.testing.assert_allclose(states, expected, rtol=1e-12, atol=1e-15)


class TestLoopMatrix:
    def test_scalar(self) -> None:
        p = canonical_program([[0.3]])
        np.testing.assert_allclose(loop_matrix(p), [[0.0, 1.0], [0.0, 0.3]])

    def test_reference(self) -> None:
        np.testing.assert_allclose(
            loop_matrix(canonical_program(REFERENCE_A)),
            [
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, -0.1, -0.2],
            ],
        )

    def test_empty_body(self) -> None:
        p = Program(n=2, a=REFERENCE_A, init_box=[1.0, 1.0], body=[])
        np.testing.assert_array_equal(loop_matrix(p), np.eye(4))

    def test_composition(self, rng: np.random.Generator) -> None:
        for _ in range(50):
            n = int(rng.integers(1, 6))
            a = rng.standard_normal((n, n))
            np.testing.assert_allclose(
                loop_matrix(canonical_program(a)), net_loop_map(a), rtol=0, atol=1e-12
            )


class TestLayout:
    def test_slots(self) -> None:
        assert [y_slot(i, 3) for i in (1, 2, 3)] == [0, 1, 2]
        assert [x_slot(i, 3) for i in (1, 2, 3)] == [3, 4, 5]

    def test_labels(self) -> None:
        assert state_labels(2) == ["y1", "y2", "x1", "x2"]

    def test_describe(self) -> None:
        assert CopyToY(i=1).describe() == "y[1] := x[1]"
        assert ResetX(i=2).describe() == "x[2] := 0"
        assert Mac(i=2, j=1, a=-0.1).describe() == "x[2] := x[2] + (-0.1) * y[1]"


class TestProgramDocuments:
    def test_round_trip(self) -> None:
        p = canonical_program(REFERENCE_A, [1.0, 2.0])
        assert parse_program(serialize_program(p)) == p

    def test_document_shape(self) -> None:
        doc = json.loads(serialize_program(canonical_program([[0.5]])))
        assert doc == {
            "n": 1,
            "A": [[0.5]],
            "init_box": [1.0],
            "body": [
                {"op": "copy", "i": 1},
                {"op": "reset", "i": 1},
                {"op": "mac", "i": 1, "j": 1, "a": 0.5},
            ],
        }

    def test_init_box_defaults_to_ones(self) -> None:
        p = parse_program('{"n": 2, "A": [[0, 1], [0, 0]], "body": []}')
        assert p.init_box == [1.0, 1.0]

    def test_out_of_range_mac_names_instruction(self) -> None:
        text = json.dumps(
            {
                "n": 2,
                "A": REFERENCE_A,
                "body": [{"op": "copy", "i": 1}, {"op": "mac", "i": 3, "j": 1, "a": 1}],
            }
        )
        with pytest.raises(ProgramParseError, match=r"body\[1\] \(mac 3,1\)"):
            parse_program(text)

    def test_unknown_op_has_location(self) -> None:
        text = json.dumps(
            {"n": 1, "A": [[0.5]], "body": [{"op": "jump", "i": 1}]}
        )
        with pytest.raises(ProgramParseError) as info:
            parse_program(text)
        assert info.value.location is not None
        assert info.value.location.startswith("body[0]")

    def test_zero_index_rejected(self) -> None:
        text = json.dumps({"n": 1, "A": [[0.5]], "body": [{"op": "reset", "i": 0}]})
        with pytest.raises(ProgramParseError, match="body"):
            parse_program(text)

    def test_malformed_json(self) -> None:
        with pytest.raises(ProgramParseError):
            parse_program('{"n": 1, "A": [[0.5]')

    def test_non_finite_rejected(self) -> None:
        with pytest.raises(ProgramParseError):
            parse_program('{"n": 1, "A": [[NaN]], "body": []}')

    def test_wrong_matrix_shape(self) -> None:
        with pytest.raises(ProgramParseError, match="2x2"):
            parse_program('{"n": 2, "A": [[1, 0]], "body": []}')

    def test_non_canonical_body_accepted(self) -> None:
        text = json.dumps(
            {
                "n": 1,
                "A": [[0.5]],
                "body": [
                    {"op": "copy", "i": 1},
                    {"op": "reset", "i": 1},
                    {"op": "reset", "i": 1},
                    {"op": "mac", "i": 1, "j": 1, "a": 0.5},
                ],
            }
        )
        p = parse_program(text)
        assert len(p.body) == 4


class TestMatrixDocuments:
    def test_bare_array(self) -> None:
        parsed = parse_matrix("[[1, 2], [3, 4]]")
        np.testing.assert_array_equal(parsed, [[1, 2], [3, 4]])

    def test_keyed_object(self) -> None:
        np.testing.assert_array_equal(parse_matrix('{"A": [[0.5]]}'), [[0.5]])

    def test_ragged_rows(self) -> None:
        with pytest.raises(InvalidInputError, match="different lengths"):
            parse_matrix("[[1, 2], [3]]")

    def test_missing_key(self) -> None:
        with pytest.raises(InvalidInputError, match="'A'"):
            parse_matrix('{"B": [[1]]}')

    def test_invalid_json(self) -> None:
        with pytest.raises(InvalidInputError, match="not valid JSON"):
            parse_matrix("[[1, 2]")
