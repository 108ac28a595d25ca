import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import BASE_TIME, make_provenance, random_warehouse
from oracles import oracle_violation_codes

from infowarehouse.errors import (
    ConstraintError,
    DuplicateError,
    NotFoundError,
    StateError,
    ValidationError,
)
from infowarehouse.model import (
    IeType,
    LinkKind,
    LinkStatus,
    ProvenanceRecord,
    SourceSpan,
)
from infowarehouse.storage import save_bytes
from infowarehouse.warehouse import Warehouse


@pytest.fixture
def w():
    return Warehouse()


@pytest.fixture
def populated():
    w = Warehouse()
    ti = w.create_task_instance("planning", "Campaign plan Q3")
    a = w.add_element(ti.id, IeType.GOAL, "lift revenue", make_provenance())
    b = w.add_element(ti.id, IeType.NOTE, "weigh a discount", make_provenance())
    return w, ti, a, b


class TestTaskInstances:
    def test_create_registers_fresh_ti(self, w):
        before = len(w.tis)
        ti = w.create_task_instance("planning", "Campaign plan Q3")
        assert len(w.tis) == before + 1
        assert w.get_task_instance(ti.id).title == "Campaign plan Q3"
        assert ti.member_ids == []

    def test_empty_title_rejected(self, w):
        with pytest.raises(ValidationError):
            w.create_task_instance("research", "")

    def test_identical_calls_get_distinct_ids(self, w):
        first = w.create_task_instance("planning", "twin")
        second = w.create_task_instance("planning", "twin")
        assert first.id != second.id

    def test_other_kw_type_needs_label(self, w):
        w.create_task_instance("other:triage", "labelled")
        with pytest.raises(ValidationError):
            w.create_task_instance("other:", "unlabelled")
        with pytest.raises(ValidationError):
            w.create_task_instance("something-else", "bad")


class TestElements:
    def test_round_trip(self, populated):
        w, ti, a, _ = populated
        got = w.get_element(a.id)
        assert got == a
        assert got.principal_content == "lift revenue"
        assert got.ti_id == ti.id

    def test_unknown_ti_rejected(self, w):
        with pytest.raises(NotFoundError):
            w.add_element("missing", IeType.NOTE, "text", make_provenance())

    def test_empty_content_rejected(self, populated):
        w, ti, _, _ = populated
        with pytest.raises(ValidationError):
            w.add_element(ti.id, IeType.NOTE, "", make_provenance())

    def test_inverted_span_rejected(self, populated):
        w, ti, _, _ = populated
        w.register_document("doc1", "Doc", "A", "full document text")
        bad = make_provenance(which=SourceSpan("doc1", 10, 5))
        with pytest.raises(ValidationError):
            w.add_element(ti.id, IeType.EXCERPT, "text", bad)

    def test_span_must_name_registered_document(self, populated):
        w, ti, _, _ = populated
        orphan = make_provenance(which=SourceSpan("ghost", 0, 4))
        with pytest.raises(ValidationError):
            w.add_element(ti.id, IeType.EXCERPT, "text", orphan)

    def test_empty_facet_rejected(self, populated):
        w, ti, _, _ = populated
        with pytest.raises(ValidationError):
            w.add_element(ti.id, IeType.NOTE, "text", make_provenance(how=""))

    def test_membership_follows_insertion_order(self, populated):
        w, ti, a, b = populated
        c = w.add_element(ti.id, IeType.NOTE, "third", make_provenance())
        assert w.get_task_instance(ti.id).member_ids == [a.id, b.id, c.id]

    def test_get_unknown_element(self, w):
        with pytest.raises(NotFoundError):
            w.get_element("nope")
        with pytest.raises(NotFoundError):
            w.get_task_instance("nope")


class TestLinks:
    def test_creational_cross_ti_rejected(self, w):
        t1 = w.create_task_instance("planning", "one")
        t2 = w.create_task_instance("planning", "two")
        a = w.add_element(t1.id, IeType.NOTE, "a", make_provenance())
        b = w.add_element(t2.id, IeType.NOTE, "b", make_provenance())
        with pytest.raises(ConstraintError) as excinfo:
            w.add_link(a.id, b.id, LinkKind.CREATIONAL)
        assert excinfo.value.rule == "creational-cross-ti"

    def test_reference_crosses_ti_freely(self, w):
        t1 = w.create_task_instance("planning", "one")
        t2 = w.create_task_instance("planning", "two")
        a = w.add_element(t1.id, IeType.NOTE, "a", make_provenance())
        b = w.add_element(t2.id, IeType.NOTE, "b", make_provenance())
        link = w.add_link(a.id, b.id, LinkKind.REFERENCE)
        assert w.get_link(link.id).kind is LinkKind.REFERENCE

    def test_reference_intra_ti_allowed(self, populated):
        w, _, a, b = populated
        assert w.add_link(a.id, b.id, LinkKind.REFERENCE)

    def test_three_cycle_rejected(self, populated):
        w, ti, a, b = populated
        c = w.add_element(ti.id, IeType.NOTE, "c", make_provenance())
        w.add_link(a.id, b.id, LinkKind.CREATIONAL)
        w.add_link(b.id, c.id, LinkKind.CREATIONAL)
        with pytest.raises(ConstraintError) as excinfo:
            w.add_link(c.id, a.id, LinkKind.CREATIONAL)
        assert excinfo.value.rule == "creational-cycle"

    def test_self_link_rejected(self, populated):
        w, _, a, _ = populated
        with pytest.raises(ValidationError):
            w.add_link(a.id, a.id, LinkKind.REFERENCE)

    def test_duplicate_pair_rejected_per_kind(self, populated):
        w, _, a, b = populated
        w.add_link(a.id, b.id, LinkKind.REFERENCE)
        with pytest.raises(DuplicateError):
            w.add_link(a.id, b.id, LinkKind.REFERENCE)
        # other kind and other direction are both still free
        w.add_link(b.id, a.id, LinkKind.REFERENCE)
        w.add_link(a.id, b.id, LinkKind.CREATIONAL)

    def test_unknown_endpoint_rejected(self, populated):
        w, _, a, _ = populated
        with pytest.raises(NotFoundError):
            w.add_link(a.id, "ghost", LinkKind.REFERENCE)

    def test_rejected_link_frees_the_pair(self, populated):
        w, _, a, b = populated
        pending = w.add_link(a.id, b.id, LinkKind.REFERENCE, status=LinkStatus.PENDING_REVIEW)
        w.review_link(pending.id, "reject")
        assert w.add_link(a.id, b.id, LinkKind.REFERENCE)


class TestReview:
    def test_confirm_then_confirm_errors(self, populated):
        w, _, a, b = populated
        pending = w.add_link(a.id, b.id, LinkKind.REFERENCE, status=LinkStatus.PENDING_REVIEW)
        confirmed = w.review_link(pending.id, "confirm")
        assert confirmed.status is LinkStatus.CONFIRMED
        with pytest.raises(StateError):
            w.review_link(pending.id, "confirm")

    def test_reject_is_terminal_but_retained(self, populated):
        w, _, a, b = populated
        pending = w.add_link(a.id, b.id, LinkKind.REFERENCE, status=LinkStatus.PENDING_REVIEW)
        rejected = w.review_link(pending.id, "reject")
        assert rejected.status is LinkStatus.REJECTED
        assert w.get_link(pending.id).status is LinkStatus.REJECTED
        with pytest.raises(StateError):
            w.review_link(pending.id, "confirm")

    def test_unknown_link(self, w):
        with pytest.raises(NotFoundError):
            w.review_link("ghost", "confirm")

    def test_bad_decision(self, populated):
        w, _, a, b = populated
        pending = w.add_link(a.id, b.id, LinkKind.REFERENCE, status=LinkStatus.PENDING_REVIEW)
        with pytest.raises(ValidationError):
            w.review_link(pending.id, "maybe")


class TestDeprecation:
    def test_deprecate_sets_flag_and_reason(self, populated):
        w, _, a, _ = populated
        updated = w.deprecate_element(a.id, "superseded by v2")
        assert updated.deprecated is True
        assert "superseded by v2" in updated.provenance.why
        assert w.get_element(a.id).deprecated is True

    def test_deprecate_twice_is_idempotent(self, populated):
        w, _, a, _ = populated
        first = w.deprecate_element(a.id, "old")
        second = w.deprecate_element(a.id, "old again")
        assert second == first  # second call succeeds without changing state

    def test_unknown_element(self, w):
        with pytest.raises(NotFoundError):
            w.deprecate_element("ghost", "why not")


class TestValidate:
    def test_fresh_consistent_warehouse(self, populated):
        w, *_ = populated
        assert w.validate() == []

    def test_dangling_link_reported(self, populated):
        w, _, a, b = populated
        link = w.add_link(a.id, b.id, LinkKind.REFERENCE)
        del w.elements[b.id]  # corrupt the store behind the API's back
        w.tis[a.ti_id].member_ids.remove(b.id)
        violations = w.validate()
        assert any(v.code == "dangling-endpoint" and v.subject_id == link.id for v in violations)
        ours = {(v.code, v.subject_id) for v in violations if v.code != "index-mismatch"}
        assert ours == oracle_violation_codes(w)

    def test_membership_omission_reported(self, populated):
        w, ti, a, _ = populated
        w.tis[ti.id].member_ids.remove(a.id)
        violations = w.validate()
        assert any(v.code == "membership-missing" and v.subject_id == a.id for v in violations)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_corruption_matches_oracle(self, seed):
        rng = random.Random(seed)
        w = random_warehouse(rng, max_elements=15, max_links=40)
        # smash state directly: drop an element, cross-wire a ti_id
        victims = sorted(w.elements)
        if victims:
            del w.elements[victims[0]]
        if len(w.tis) > 1 and victims:
            import dataclasses

            other = next(iter(sorted(w.tis)))
            eid = victims[-1]
            if eid in w.elements:
                w.elements[eid] = dataclasses.replace(w.elements[eid], ti_id=other)
        ours = {(v.code, v.subject_id) for v in w.validate() if v.code != "index-mismatch"}
        assert ours == oracle_violation_codes(w)


class TestAtomicity:
    def test_rejected_ops_leave_state_bit_identical(self, populated):
        w, ti, a, b = populated
        t2 = w.create_task_instance("research", "other")
        c = w.add_element(t2.id, IeType.NOTE, "c", make_provenance())
        w.add_link(a.id, b.id, LinkKind.CREATIONAL)
        before = save_bytes(w)
        attempts = [
            lambda: w.add_link(a.id, c.id, LinkKind.CREATIONAL),  # cross-TI
            lambda: w.add_link(b.id, a.id, LinkKind.CREATIONAL),  # cycle
            lambda: w.add_link(a.id, a.id, LinkKind.REFERENCE),  # self
            lambda: w.add_link(a.id, b.id, LinkKind.CREATIONAL),  # duplicate
            lambda: w.add_element(ti.id, IeType.NOTE, "", make_provenance()),
            lambda: w.add_element("ghost", IeType.NOTE, "x", make_provenance()),
            lambda: w.create_task_instance("planning", ""),
            lambda: w.review_link("ghost", "confirm"),
            lambda: w.deprecate_element("ghost", "x"),
        ]
        for attempt in attempts:
            with pytest.raises(Exception):
                attempt()
            assert save_bytes(w) == before


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_random_valid_sequences_stay_consistent(seed):
    w = random_warehouse(random.Random(seed), max_elements=20, max_links=60)
    assert w.validate() == []


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_creational_links_never_cross_ti(seed):
    w = random_warehouse(random.Random(seed), max_elements=20, max_links=60)
    for link in w.links.values():
        if link.kind is LinkKind.CREATIONAL:
            assert w.elements[link.src].ti_id == w.elements[link.dst].ti_id


def test_provenance_record_defaults_are_sentinels():
    record = ProvenanceRecord(when=BASE_TIME)
    record.check()
    assert record.how == record.whom == "unknown"
