import numpy as np

from chtwsim.models import CarrierKind, CHTWSystem, MarkFunction, ScheduledField, Severity, WCarrier, WMode
from chtwsim.models.system import CBrane, FieldEntry
from chtwsim.services import validate_system

from tests.factories import cbrane, hcarrier, line_space, point_space, tbrane, wkernel, wpointwise


def error_codes(system):
    return sorted(d.code for d in validate_system(system).errors)


def two_space_system(**changes):
    parts = dict(
        spaces=(line_space("X", 4), line_space("Y", 3)),
        cbranes=(cbrane("a", "X", np.ones(4)), cbrane("b", "Y", np.zeros(3))),
        tbranes=(tbrane("t", "X", np.full(4, 0.5)),),
        hcarriers=(hcarrier("h", "a", "t", np.full(4, 0.2)),),
        wcarriers=(wkernel("w", "t", "b", np.ones((4, 3))),),
    )
    parts.update(changes)
    return CHTWSystem(**parts)


class TestValidateSystem:
    def test_feedback_structure_is_clean(self, feedback):
        diagnostics = validate_system(feedback)
        assert diagnostics.runnable
        assert diagnostics.errors == []

    def test_empty_system(self):
        assert len(validate_system(CHTWSystem())) == 0

    def test_idempotent(self, feedback):
        assert validate_system(feedback) == validate_system(feedback)

    def test_cross_dimension_w_carrier_passes(self):
        assert error_codes(two_space_system()) == []

    def test_prop3_violation(self):
        system = two_space_system(tbranes=(tbrane("t", "Y", np.full(3, 0.5)),), wcarriers=())
        assert error_codes(system) == ["PROP3_VIOLATION"]
        (diagnostic,) = validate_system(system).errors
        assert diagnostic.location.element == "hcarrier h"

    def test_unknown_reference(self):
        system = two_space_system(hcarriers=(hcarrier("h", "a", "Tz", np.full(4, 0.2)),))
        assert error_codes(system) == ["UNKNOWN_REFERENCE"]

    def test_wrong_endpoint_kind(self):
        # H-carrier from a T-brane into a T-brane
        system = two_space_system(hcarriers=(hcarrier("h", "t", "t", np.full(4, 0.2)),))
        assert error_codes(system) == ["WRONG_ENDPOINT_KIND"]

    def test_duplicate_ids(self):
        system = two_space_system(tbranes=(tbrane("a", "X", np.full(4, 0.5)),), hcarriers=(), wcarriers=())
        assert "DUPLICATE_ID" in error_codes(system)

    def test_ids_are_unique_across_declaration_kinds(self):
        system = two_space_system(hcarriers=(hcarrier("a", "a", "t", np.full(4, 0.2)),))
        assert error_codes(system) == ["DUPLICATE_ID"]
        (diagnostic,) = validate_system(system).errors
        assert "cbrane, hcarrier" in diagnostic.message

    def test_duplicate_carrier_pair(self):
        system = two_space_system(
            hcarriers=(hcarrier("h1", "a", "t", np.full(4, 0.2)), hcarrier("h2", "a", "t", np.full(4, 0.3)))
        )
        assert error_codes(system) == ["DUPLICATE_CARRIER"]

    def test_shape_mismatch(self):
        system = two_space_system(wcarriers=(wkernel("w", "t", "b", np.ones((3, 4))),))
        assert error_codes(system) == ["SHAPE_MISMATCH"]

    def test_negative_parameters(self):
        system = two_space_system(
            tbranes=(tbrane("t", "X", [0.5, -1, 0.5, 0.5]),),
            hcarriers=(hcarrier("h", "a", "t", np.full(4, -0.2), CarrierKind.BLOCKING),),
        )
        assert error_codes(system) == ["NEGATIVE_PARAMETER", "NEGATIVE_PARAMETER"]

    def test_negative_initial_mark(self):
        system = two_space_system(cbranes=(cbrane("a", "X", [1, 1, -1, 1]), cbrane("b", "Y", np.zeros(3))))
        assert error_codes(system) == ["NEGATIVE_INITIAL_MARK"]

    def test_non_finite_value(self):
        system = two_space_system(hcarriers=(hcarrier("h", "a", "t", [0.2, np.nan, 0.2, 0.2]),))
        assert error_codes(system) == ["NON_FINITE_VALUE"]

    def test_schedule_order(self):
        bad = ScheduledField(entries=(FieldEntry(start_step=2, values=np.full(4, 0.5)),))
        assert error_codes(two_space_system(tbranes=(tbrane("t", "X", bad),))) == ["SCHEDULE_ORDER"]

    def test_pointwise_needs_one_space(self):
        system = two_space_system(wcarriers=(wpointwise("w", "t", "b", np.ones(4)),))
        assert error_codes(system) == ["POINTWISE_SPACE_MISMATCH"]

    def test_missing_operator(self):
        carrier = WCarrier(id="w", source="t", target="b", mode=WMode.KERNEL)
        assert error_codes(two_space_system(wcarriers=(carrier,))) == ["MISSING_OPERATOR"]

    def test_mark_brane_mismatch(self):
        brane = CBrane(id="a", space="X", initial=MarkFunction(brane="zz", values=np.ones(4)))
        system = two_space_system(cbranes=(brane, cbrane("b", "Y", np.zeros(3))))
        assert error_codes(system) == ["MARK_BRANE_MISMATCH"]

    def test_invalid_axis_and_identifier(self):
        system = CHTWSystem(spaces=(line_space("space", 2, 1, 1),))
        assert error_codes(system) == ["INVALID_AXIS", "INVALID_ID"]

    def test_isolated_brane_is_only_a_warning(self):
        system = CHTWSystem(spaces=(point_space("P"),), cbranes=(cbrane("lonely", "P", 1),))
        diagnostics = validate_system(system)
        assert diagnostics.runnable
        assert [(d.severity, d.code) for d in diagnostics] == [(Severity.WARNING, "ISOLATED_BRANE")]

    def test_collects_every_problem(self):
        system = two_space_system(
            hcarriers=(hcarrier("h", "a", "Tz", np.full(4, 0.2)),),
            wcarriers=(wkernel("w", "t", "b", np.ones((3, 4))),),
        )
        assert error_codes(system) == ["SHAPE_MISMATCH", "UNKNOWN_REFERENCE"]


class TestDerivedSystems:
    def test_copy_after_validation_sees_new_branes(self, chain):
        assert validate_system(chain).errors == []
        assert chain.cbranes_by_id.keys() == {"Ci", "Cg"}

        derived = chain.model_copy(
            update={
                "cbranes": (*chain.cbranes, cbrane("Cj", "P", 7)),
                "hcarriers": (*chain.hcarriers, hcarrier("b", "Cj", "Tp", 5, CarrierKind.BLOCKING)),
            }
        )

        assert validate_system(derived).errors == []
        assert derived.cbranes_by_id.keys() == {"Ci", "Cg", "Cj"}

    def test_copy_after_validation_sees_removed_spaces(self, chain):
        validate_system(chain)
        derived = chain.model_copy(update={"spaces": (point_space("Q"),)})
        assert "P" not in derived.spaces_by_id
        assert "UNKNOWN_REFERENCE" in error_codes(derived)
