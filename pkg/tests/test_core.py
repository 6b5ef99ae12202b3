import itertools

import pytest
from hypothesis import given, strategies as st

from implylogic.core import (ExecutionError, Program, count_steps, eval_imply,
                             exec_instruction, false_, imply, load, run_program)

NAND = Program(
    registers=("P", "Q", "S"),
    inputs=("P", "Q"),
    outputs=("S",),
    body=(false_("S"), imply("P", "S"), imply("Q", "S")),
)

XOR9 = Program(
    registers=("A", "B", "M0", "M1"),
    inputs=("A", "B"),
    outputs=("M0",),
    body=(false_("M0"), imply("A", "M0"), false_("M1"), imply("B", "M1"),
          imply("A", "B"), imply("M0", "M1"), false_("M0"), imply("M1", "M0"),
          imply("B", "M0")),
)


def test_eval_imply_truth_table():
    assert eval_imply(0, 0) == 1
    assert eval_imply(0, 1) == 1
    assert eval_imply(1, 0) == 0
    assert eval_imply(1, 1) == 1


class TestExecInstruction:
    def test_imply_case3(self):
        assert exec_instruction({"P": 1, "Q": 0}, imply("P", "Q")) == {"P": 1, "Q": 0}

    def test_imply_case1(self):
        assert exec_instruction({"P": 0, "Q": 0}, imply("P", "Q")) == {"P": 0, "Q": 1}

    def test_false_forces_zero(self):
        assert exec_instruction({"S": 1}, false_("S")) == {"S": 0}
        assert exec_instruction({"S": 0}, false_("S")) == {"S": 0}

    def test_load(self):
        assert exec_instruction({"P": 0}, load("P", 1)) == {"P": 1}

    def test_unknown_register(self):
        with pytest.raises(ExecutionError, match="'Z'"):
            exec_instruction({"P": 1}, false_("Z"))
        with pytest.raises(ExecutionError, match="'Q'"):
            exec_instruction({"P": 1, "S": 0}, imply("Q", "S"))

    @given(st.dictionaries(st.sampled_from("ABCD"), st.integers(0, 1), min_size=2))
    def test_modifies_at_most_target(self, state):
        regs = sorted(state)
        instr = imply(regs[0], regs[1])
        out = exec_instruction(state, instr)
        for r in state:
            if r != instr.target:
                assert out[r] == state[r]


class TestRunProgram:
    def test_nand_all_rows(self):
        for p, q in itertools.product((0, 1), repeat=2):
            res = run_program(NAND, {"P": p, "Q": q})
            assert res.final["S"] == 1 - (p & q)
            assert res.steps == 3

    def test_xor9(self):
        for a, b in itertools.product((0, 1), repeat=2):
            res = run_program(XOR9, {"A": a, "B": b})
            assert res.final["M0"] == a ^ b
            assert res.steps == 9

    def test_empty_body(self):
        prog = Program(registers=("X", "Y"))
        res = run_program(prog)
        assert res.final == {"X": 0, "Y": 0}
        assert res.steps == 0
        assert res.trace == []

    def test_missing_input(self):
        with pytest.raises(ExecutionError, match="'Q'"):
            run_program(NAND, {"P": 1})

    def test_extra_input(self):
        with pytest.raises(ExecutionError, match="'Z'"):
            run_program(NAND, {"P": 1, "Q": 0, "Z": 1})

    def test_trace_one_entry_per_instruction(self):
        res = run_program(NAND, {"P": 1, "Q": 1})
        assert [i for i, _, _ in res.trace] == [0, 1, 2]

    def test_deterministic(self):
        a = run_program(XOR9, {"A": 1, "B": 0})
        b = run_program(XOR9, {"A": 1, "B": 0})
        assert a == b

    def test_loads_execute_but_do_not_count(self):
        prog = Program(registers=("P", "S"), body=(load("P", 1), false_("S"), imply("P", "S")))
        res = run_program(prog)
        assert res.final == {"P": 1, "S": 0}
        assert res.steps == 2


@given(st.integers(0, 1), st.integers(0, 1))
def test_false_then_imply_is_not(p, q):
    # FALSE(q); IMPLY(p, q) leaves q = NOT p for any prior q
    state = {"P": p, "Q": q}
    state = exec_instruction(state, false_("Q"))
    state = exec_instruction(state, imply("P", "Q"))
    assert state["Q"] == 1 - p


@given(st.integers(0, 1), st.integers(0, 1))
def test_imply_idempotent_on_result(p, q):
    once = exec_instruction({"P": p, "Q": q}, imply("P", "Q"))
    twice = exec_instruction(once, imply("P", "Q"))
    assert once["Q"] == twice["Q"]


def test_count_steps():
    assert count_steps(XOR9) == 9
    assert count_steps(Program(registers=("P",), body=(load("P", 1),))) == 0
    assert count_steps(NAND) == 3


def test_imply_requires_distinct_operands():
    with pytest.raises(ValueError, match="differ"):
        imply("P", "P")
