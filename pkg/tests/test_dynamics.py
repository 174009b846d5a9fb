import numpy as np
import pytest

from chtwsim.errors import NegativeResourceError, ShapeMismatchError, UnvalidatedSystemError
from chtwsim.models import CarrierKind, CHTWSystem, ParameterOverrides, RunOptions, ScheduledField, SystemState
from chtwsim.services import Simulator, apply_w, build_grid, compile_system, initial_state, run, step

from tests.factories import (
    cbrane,
    chain_system,
    cube_space,
    feedback_point_system,
    hcarrier,
    line_space,
    oracle_firing,
    oracle_step,
    point_space,
    random_system,
    tbrane,
    wkernel,
    wpointwise,
)

FEEDBACK_STATES = [
    (5, 0, 4, 0),
    (3, 3, 4, 0),
    (2, 5, 3, 1),
    (3, 4, 2, 2),
    (2, 6, 1, 3),
    (2, 6, 1, 3),
]


def values(state, order):
    return tuple(float(state.marks[c][0]) for c in order)


class TestApplyW:
    def test_pointwise(self):
        carrier = wpointwise("w", "t", "c", [1.5, 1.5, 1.5])
        grid = build_grid(line_space("X", 3))
        assert apply_w(carrier, np.array([1.0, 0.0, 1.0]), 0, grid).tolist() == [1.5, 0.0, 1.5]

    def test_kernel_weighted_by_source_volume(self):
        carrier = wkernel("w", "t", "c", np.full((2, 3), 2.0))
        source = build_grid(line_space("X", 2))  # volume 0.5
        assert apply_w(carrier, np.array([1.0, 0.0]), 0, source).tolist() == [1.0, 1.0, 1.0]

    def test_zero_firing(self):
        carrier = wkernel("w", "t", "c", np.full((2, 3), 2.0))
        source = build_grid(line_space("X", 2))
        assert apply_w(carrier, np.zeros(2), 0, source).tolist() == [0.0, 0.0, 0.0]

    def test_wrong_firing_shape(self):
        carrier = wpointwise("w", "t", "c", [1.0, 1.0])
        with pytest.raises(ShapeMismatchError):
            apply_w(carrier, np.ones(3), 0, build_grid(line_space("X", 2)))

    def test_operator_override(self):
        carrier = wpointwise("w", "t", "c", [1.0])
        overrides = ParameterOverrides(operators={"w": [4.0]})
        assert apply_w(carrier, np.ones(1), 0, build_grid(point_space()), overrides).tolist() == [4.0]


class TestStep:
    def test_chain(self, chain):
        state, report = step(chain, initial_state(chain))
        assert state.step == 1
        assert values(state, ["Ci", "Cg"]) == (3.0, 2.0)
        assert report.firing["Tp"].values.tolist() == [1.0]
        assert report.consumed == {"Ci": 2.0, "Cg": 0.0}
        assert report.produced == {"Ci": 0.0, "Cg": 2.0}

    def test_blocking_carrier_annihilates(self):
        base = chain_system()
        system = base.model_copy(
            update={
                "cbranes": (*base.cbranes, cbrane("Cj", "P", 7)),
                "hcarriers": (*base.hcarriers, hcarrier("b", "Cj", "Tp", 5, CarrierKind.BLOCKING)),
            }
        )
        state, report = step(system, initial_state(system))
        assert report.firing["Tp"].values.tolist() == [0.0]
        assert values(state, ["Ci", "Cg", "Cj"]) == (5.0, 0.0, 7.0)

    def test_fixed_point_below_thresholds(self):
        system = chain_system(m_i=0.5)
        state, _ = step(system, initial_state(system))
        assert values(state, ["Ci", "Cg"]) == (0.5, 0.0)

    def test_overdraw_reports_negative_resource(self):
        system = CHTWSystem(
            spaces=(point_space(),),
            cbranes=(cbrane("m", "P", 3),),
            tbranes=(tbrane("p", "P", 2), tbrane("l", "P", 2)),
            hcarriers=(hcarrier("hp", "m", "p", 1), hcarrier("hl", "m", "l", 1)),
        )
        state, report = step(system, initial_state(system))
        assert state.marks["m"].tolist() == [-1.0]
        (diagnostic,) = report.diagnostics
        assert (diagnostic.code, diagnostic.step, diagnostic.cell_index, diagnostic.value) == (
            "NEGATIVE_RESOURCE",
            1,
            0,
            -1.0,
        )

    def test_rejects_invalid_system(self):
        system = CHTWSystem(
            spaces=(line_space("X", 2), line_space("Y", 3)),
            cbranes=(cbrane("a", "X", [1, 1]),),
            tbranes=(tbrane("t", "Y", [1, 1, 1]),),
            hcarriers=(hcarrier("h", "a", "t", [0, 0]),),
        )
        with pytest.raises(UnvalidatedSystemError) as exc:
            step(system, initial_state(system))
        assert exc.value.code == "UNVALIDATED_SYSTEM"
        assert [d.code for d in exc.value.diagnostics] == ["PROP3_VIOLATION"]

    def test_rejects_state_of_wrong_shape(self, chain):
        with pytest.raises(ShapeMismatchError):
            step(chain, SystemState(step=0, marks={"Ci": [1.0, 2.0], "Cg": [0.0]}))

    def test_reads_only_pre_step_marks(self):
        # t1 refills `b` while t2 drains it; t2 sees b=0 at step 0 and stays off
        system = CHTWSystem(
            spaces=(point_space(),),
            cbranes=(cbrane("a", "P", 5), cbrane("b", "P", 0)),
            tbranes=(tbrane("t1", "P", 1), tbrane("t2", "P", 1)),
            hcarriers=(hcarrier("a_t1", "a", "t1", 0.5), hcarrier("b_t2", "b", "t2", 0.5)),
            wcarriers=(wpointwise("t1_b", "t1", "b", 3),),
        )
        state, report = step(system, initial_state(system))
        assert report.firing["t2"].values.tolist() == [0.0]
        assert values(state, ["a", "b"]) == (4.0, 3.0)

    def test_declaration_order_does_not_matter(self, feedback):
        shuffled = CHTWSystem(
            spaces=tuple(reversed(feedback.spaces)),
            cbranes=tuple(reversed(feedback.cbranes)),
            tbranes=tuple(reversed(feedback.tbranes)),
            hcarriers=tuple(reversed(feedback.hcarriers)),
            wcarriers=tuple(reversed(feedback.wcarriers)),
        )
        a, b = run(feedback, 5), run(shuffled, 5)
        for sa, sb in zip(a.states, b.states):
            for brane in feedback.c_order:
                assert sa.marks[brane].tolist() == sb.marks[brane].tolist()


class TestFeedback:
    def test_hand_iteration(self, feedback):
        trace = run(feedback, 5)
        assert [values(s, ["i", "j", "q", "g"]) for s in trace.states] == FEEDBACK_STATES
        assert trace.integral_resource == [9.0, 10.0, 11.0, 11.0, 12.0, 12.0]

    def test_scalar_equations(self):
        # m_i' = m_i - r_p d_p + w_li d_l; m_j' = m_j - r_l d_l + w_pj d_p; m_q' = m_q - r_l d_l; m_g' = m_g + w_lg d_l
        r_p, r_l, w_pj, w_li, w_lg = 1.5, 0.5, 2.0, 0.25, 3.0
        system = feedback_point_system((4, 2, 3, 0), r_p, r_l, 1, w_pj, w_li, w_lg)
        state = initial_state(system)
        for _ in range(6):
            i, j, q, g = values(state, ["i", "j", "q", "g"])
            d_p = 1 if (i > 1 and i > r_p) else 0
            d_l = 1 if (j > 1 and j > r_l and q > 1 and q > r_l) else 0
            expected = (i - r_p * d_p + w_li * d_l, j - r_l * d_l + w_pj * d_p, q - r_l * d_l, g + w_lg * d_l)
            state, _ = step(system, state)
            assert values(state, ["i", "j", "q", "g"]) == pytest.approx(expected, abs=1e-9)


class TestRun:
    def test_zero_steps(self, chain):
        trace = run(chain, 0)
        assert trace.recorded_steps == [0]
        assert trace.reports == []
        assert trace.integral_resource == [5.0]

    def test_deterministic(self):
        system = random_system(np.random.default_rng(7))
        a, b = run(system, 10), run(system, 10)
        assert a.integral_resource == b.integral_resource
        for sa, sb in zip(a.states, b.states):
            for brane in system.c_order:
                assert sa.marks[brane].tobytes() == sb.marks[brane].tobytes()

    def test_sampling(self, feedback):
        trace = run(feedback, 5, RunOptions(sample_every=2))
        assert trace.recorded_steps == [0, 2, 4, 5]
        assert len(trace.reports) == 5
        assert len(trace.integral_resource) == 6
        assert trace.state_at(3) is None
        assert trace.final_state.step == 5

    def test_strict_abort(self):
        system = CHTWSystem(
            spaces=(point_space(),),
            cbranes=(cbrane("m", "P", 3),),
            tbranes=(tbrane("p", "P", 2), tbrane("l", "P", 2)),
            hcarriers=(hcarrier("hp", "m", "p", 1), hcarrier("hl", "m", "l", 1)),
        )
        with pytest.raises(NegativeResourceError) as exc:
            run(system, 5, RunOptions(strict=True, sample_every=10))
        trace = exc.value.trace
        assert trace.recorded_steps == [0, 1]
        assert trace.final_state.marks["m"].tolist() == [-1.0]
        assert [d.code for d in trace.diagnostics] == ["NEGATIVE_RESOURCE"]

    def test_non_strict_keeps_going(self):
        system = CHTWSystem(
            spaces=(point_space(),),
            cbranes=(cbrane("m", "P", 3),),
            tbranes=(tbrane("p", "P", 2), tbrane("l", "P", 2)),
            hcarriers=(hcarrier("hp", "m", "p", 1), hcarrier("hl", "m", "l", 1)),
        )
        trace = run(system, 3)
        assert trace.recorded_steps == [0, 1, 2, 3]
        assert trace.final_state.marks["m"].tolist() == [-1.0]

    def test_threshold_schedule_switches_off_at_step(self):
        schedule = ScheduledField.from_schedule({0: [2.0], 3: [20.0]})
        system = CHTWSystem(
            spaces=(point_space(),),
            cbranes=(cbrane("s", "P", 10), cbrane("sink", "P", 0)),
            tbranes=(tbrane("t", "P", 1),),
            hcarriers=(hcarrier("gate", "s", "t", schedule),),
            wcarriers=(wpointwise("out", "t", "sink", 1),),
        )
        trace = run(system, 6)
        fired = [report.firing_counts["t"] for report in trace.reports]
        assert fired == [1, 1, 1, 0, 0, 0]
        for report, state in zip(trace.reports, trace.states):
            assert [report.firing["t"].values.tolist()[0]] == oracle_firing(system, state.marks, state.step)["t"]

    def test_override_provider(self, chain):
        trace = Simulator(chain).run(3, overrides=lambda k: ParameterOverrides(rates={"Tp": [0.5]}) if k == 0 else None)
        assert trace.states[1].marks["Ci"].tolist() == [4.5]
        assert trace.states[2].marks["Ci"].tolist() == [2.5]

    def test_accepts_compiled_system(self, feedback):
        compiled = compile_system(feedback)
        assert run(compiled, 2).integral_resource == [9.0, 10.0, 11.0]


@pytest.mark.property
class TestOracleEquivalence:
    def test_random_corpus(self):
        rng = np.random.default_rng(20240501)
        for _ in range(200):
            system = random_system(rng)
            simulator = Simulator(system)
            state = initial_state(system)
            for _ in range(10):
                expected = oracle_step(system, state.marks, state.step)
                state, report = simulator.step(state)
                for brane, cells in expected.items():
                    np.testing.assert_allclose(state.marks[brane], cells, rtol=0, atol=1e-9)

    def test_wide_grid_corpus(self):
        rng = np.random.default_rng(20240503)
        for _ in range(8):
            system = random_system(rng, spaces_max=2, branes_max=2, max_cells=10)
            simulator = Simulator(system)
            state = initial_state(system)
            for _ in range(2):
                expected = oracle_step(system, state.marks, state.step)
                state, _ = simulator.step(state)
                for brane, cells in expected.items():
                    np.testing.assert_allclose(state.marks[brane], cells, rtol=0, atol=1e-9)

    def test_thousand_cell_grid(self):
        rng = np.random.default_rng(1000)
        system = CHTWSystem(
            spaces=(cube_space("V"), line_space("L", 10)),
            cbranes=(
                cbrane("food", "V", rng.integers(0, 9, size=1000) / 2.0),
                cbrane("waste", "V", np.zeros(1000)),
                cbrane("sink", "L", np.zeros(10)),
            ),
            tbranes=(tbrane("eat", "V", rng.integers(0, 5, size=1000) / 2.0),),
            hcarriers=(hcarrier("feed", "food", "eat", rng.integers(0, 5, size=1000) / 2.0),),
            wcarriers=(
                wpointwise("spill", "eat", "waste", np.full(1000, 0.5)),
                wkernel("drain", "eat", "sink", rng.integers(0, 3, size=(1000, 10)) / 2.0),
            ),
        )
        simulator = Simulator(system)
        state = initial_state(system)
        for _ in range(3):
            expected = oracle_step(system, state.marks, state.step)
            state, _ = simulator.step(state)
            for brane, cells in expected.items():
                np.testing.assert_allclose(state.marks[brane], cells, rtol=0, atol=1e-9)

    def test_resource_accounting(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            system = random_system(rng)
            trace = run(system, 10)
            for k, report in enumerate(trace.reports):
                delta = trace.integral_resource[k + 1] - trace.integral_resource[k]
                balance = sum(report.produced.values()) - sum(report.consumed.values())
                assert delta == pytest.approx(balance, rel=1e-9, abs=1e-9)

    def test_blocking_and_associative_sources_untouched(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            system = random_system(rng)
            normal_sources = {h.source for h in system.hcarriers if h.kind == CarrierKind.NORMAL}
            fed = {w.target for w in system.wcarriers}
            untouched = [c.id for c in system.cbranes if c.id not in normal_sources | fed]
            trace = run(system, 10)
            for brane in untouched:
                initial = trace.states[0].marks[brane].tobytes()
                assert all(s.marks[brane].tobytes() == initial for s in trace.states)

    def test_no_negative_marks_without_shared_sources(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 50:
            system = random_system(rng)
            consumers = [h.source for h in system.hcarriers if h.kind == CarrierKind.NORMAL]
            if len(consumers) != len(set(consumers)):
                continue
            checked += 1
            trace = run(system, 10)
            assert trace.diagnostics == []
            for state in trace.states:
                assert all(np.all(marks >= 0) for marks in state.marks.values())

