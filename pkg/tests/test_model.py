import pytest

from istarc.model import (
    ActorKind,
    ActorLinkKind,
    AndArityTooSmall,
    Contribution,
    ContributionLevel,
    ContributionQualificationClash,
    CrossActorLink,
    DuplicateActorLink,
    DuplicateChild,
    DuplicateId,
    ElementKind,
    ElmtOwnerMismatch,
    EmptyName,
    IsAKindMismatch,
    KindNotRefinable,
    MatrixViolation,
    Model,
    NeededBy,
    ParentAlreadyRefined,
    Qualification,
    RefinementOperator,
    SelfChild,
    SelfContribution,
    SelfDependency,
    SelfLink,
    SharedDependum,
    UnknownActor,
    UnknownElement,
    structurally_equal,
)

G, Q, T, R = ElementKind.GOAL, ElementKind.QUALITY, ElementKind.TASK, ElementKind.RESOURCE


@pytest.fixture
def m():
    return Model()


def test_add_actor_assigns_fresh_ids(m):
    a = m.add_actor("Student", ActorKind.ROLE)
    b = m.add_actor("Student", ActorKind.ROLE)
    assert a != b
    assert m.actors[a].name == m.actors[b].name == "Student"


@pytest.mark.parametrize("name", ["", "   ", "\t\n"])
def test_blank_names_rejected(m, name):
    with pytest.raises(EmptyName):
        m.add_actor(name, ActorKind.AGENT)


def test_unicode_names_kept_verbatim(m):
    a = m.add_actor('Ünïcode "quoted" \\ 日本', ActorKind.GENERIC)
    assert m.actors[a].name == 'Ünïcode "quoted" \\ 日本'


def test_explicit_id_collision(m):
    m.add_actor("a", ActorKind.ROLE, id="X")
    with pytest.raises(DuplicateId):
        m.add_element("X", "g", G, id="X")


def test_element_needs_known_owner(m):
    with pytest.raises(UnknownActor):
        m.add_element("nope", "g", G)


class TestActorLinks:
    def test_isa_between_roles(self, m):
        a, b = m.add_actor("PhD student", ActorKind.ROLE), m.add_actor("Student", ActorKind.ROLE)
        link = m.add_actor_link(a, b, ActorLinkKind.IS_A)
        assert m.actor_links[link].kind is ActorLinkKind.IS_A

    @pytest.mark.parametrize(
        "src,tgt",
        [
            (ActorKind.AGENT, ActorKind.ROLE),
            (ActorKind.AGENT, ActorKind.AGENT),
            (ActorKind.ROLE, ActorKind.GENERIC),
            (ActorKind.GENERIC, ActorKind.ROLE),
        ],
    )
    def test_isa_kind_mismatch(self, m, src, tgt):
        a, b = m.add_actor("a", src), m.add_actor("b", tgt)
        with pytest.raises(IsAKindMismatch) as err:
            m.add_actor_link(a, b, ActorLinkKind.IS_A)
        assert err.value.code == "E001"

    def test_isa_between_generic_actors(self, m):
        a, b = m.add_actor("a", ActorKind.GENERIC), m.add_actor("b", ActorKind.GENERIC)
        m.add_actor_link(a, b, ActorLinkKind.IS_A)

    def test_participates_any_kinds(self, m):
        a, b = m.add_actor("Mike White", ActorKind.AGENT), m.add_actor("PhD student", ActorKind.ROLE)
        m.add_actor_link(a, b, ActorLinkKind.PARTICIPATES_IN)

    def test_one_link_per_pair_either_direction(self, m):
        a, b = m.add_actor("a", ActorKind.ROLE), m.add_actor("b", ActorKind.ROLE)
        m.add_actor_link(a, b, ActorLinkKind.IS_A)
        with pytest.raises(DuplicateActorLink) as err:
            m.add_actor_link(b, a, ActorLinkKind.PARTICIPATES_IN)
        assert err.value.code == "E004"

    def test_participates_to_several_actors(self, m):
        a = m.add_actor("a", ActorKind.AGENT)
        for name in "bcd":
            m.add_actor_link(a, m.add_actor(name, ActorKind.ROLE), ActorLinkKind.PARTICIPATES_IN)
        assert len(m.actor_links) == 3

    @pytest.mark.parametrize("kind,code", [(ActorLinkKind.IS_A, "E002"), (ActorLinkKind.PARTICIPATES_IN, "E003")])
    def test_self_link(self, m, kind, code):
        a = m.add_actor("a", ActorKind.ROLE)
        with pytest.raises(SelfLink) as err:
            m.add_actor_link(a, a, kind)
        assert err.value.code == code

    def test_cycles_are_not_a_constructor_concern(self, m):
        a, b = m.add_actor("a", ActorKind.ROLE), m.add_actor("b", ActorKind.ROLE)
        c = m.add_actor("c", ActorKind.ROLE)
        m.add_actor_link(a, b, ActorLinkKind.IS_A)
        m.add_actor_link(b, c, ActorLinkKind.IS_A)
        m.add_actor_link(c, a, ActorLinkKind.IS_A)


@pytest.fixture
def student(m):
    a = m.add_actor("Student", ActorKind.ROLE)
    ids = {
        "organized": m.add_element(a, "Trip organized", G),
        "booked": m.add_element(a, "Trip booked", G),
        "authorized": m.add_element(a, "Trip authorized", G),
        "bundle": m.add_element(a, "Book bundle", T),
        "quick": m.add_element(a, "Quick booking", Q),
        "card": m.add_element(a, "Credit card", R),
    }
    return a, ids


class TestRefinement:
    def test_and_refinement(self, m, student):
        _, e = student
        r = m.add_refinement(e["organized"], [e["booked"], e["authorized"]], RefinementOperator.AND)
        assert m.refinements[r].children == (e["booked"], e["authorized"])

    def test_or_single_child(self, m, student):
        _, e = student
        m.add_refinement(e["booked"], [e["bundle"]], RefinementOperator.OR)

    def test_and_single_child(self, m, student):
        _, e = student
        with pytest.raises(AndArityTooSmall) as err:
            m.add_refinement(e["organized"], [e["booked"]], RefinementOperator.AND)
        assert err.value.code == "E014"

    def test_or_no_children(self, m, student):
        _, e = student
        with pytest.raises(AndArityTooSmall):
            m.add_refinement(e["organized"], [], RefinementOperator.OR)

    def test_self_child(self, m, student):
        _, e = student
        with pytest.raises(SelfChild):
            m.add_refinement(e["booked"], [e["booked"], e["bundle"]], RefinementOperator.AND)

    def test_duplicate_child(self, m, student):
        _, e = student
        with pytest.raises(DuplicateChild):
            m.add_refinement(e["organized"], [e["booked"], e["booked"]], RefinementOperator.AND)

    @pytest.mark.parametrize("child", ["quick", "card"])
    def test_only_goals_and_tasks_refine(self, m, student, child):
        _, e = student
        with pytest.raises(KindNotRefinable) as err:
            m.add_refinement(e["organized"], [e[child]], RefinementOperator.OR)
        assert err.value.code == "E013"

    def test_cannot_refine_quality(self, m, student):
        _, e = student
        with pytest.raises(MatrixViolation):
            m.add_refinement(e["quick"], [e["booked"]], RefinementOperator.OR)

    def test_cross_actor(self, m, student):
        _, e = student
        other = m.add_actor("Agency", ActorKind.GENERIC)
        sell = m.add_element(other, "Sell tickets", T)
        with pytest.raises(CrossActorLink) as err:
            m.add_refinement(e["booked"], [sell], RefinementOperator.OR)
        assert err.value.code == "E010"

    def test_one_refinement_per_parent(self, m, student):
        _, e = student
        m.add_refinement(e["booked"], [e["bundle"]], RefinementOperator.OR)
        with pytest.raises(ParentAlreadyRefined) as err:
            m.add_refinement(e["booked"], [e["authorized"]], RefinementOperator.OR)
        assert err.value.code == "E015"

    def test_unknown_child(self, m, student):
        _, e = student
        with pytest.raises(UnknownElement):
            m.add_refinement(e["booked"], ["E999"], RefinementOperator.OR)


class TestElementLinks:
    def test_contribution(self, m, student):
        _, e = student
        k = m.add_element_link(Contribution(e["bundle"], e["quick"], ContributionLevel.MAKE))
        assert m.element_links[k].id == k

    def test_contribution_level_by_value(self, m, student):
        _, e = student
        k = m.add_element_link(Contribution(e["bundle"], e["quick"], "hurt"))
        assert m.element_links[k].level is ContributionLevel.HURT

    def test_contribution_to_non_quality(self, m, student):
        _, e = student
        with pytest.raises(MatrixViolation):
            m.add_element_link(Contribution(e["bundle"], e["booked"], ContributionLevel.HELP))

    def test_self_contribution(self, m, student):
        _, e = student
        with pytest.raises(SelfContribution) as err:
            m.add_element_link(Contribution(e["quick"], e["quick"], ContributionLevel.HELP))
        assert err.value.code == "E012"

    def test_needed_by(self, m, student):
        _, e = student
        m.add_element_link(NeededBy(e["card"], e["bundle"]))

    def test_needed_by_wrong_way(self, m, student):
        _, e = student
        with pytest.raises(MatrixViolation):
            m.add_element_link(NeededBy(e["bundle"], e["card"]))

    @pytest.mark.parametrize("subject", ["booked", "bundle", "card"])
    def test_qualification(self, m, student, subject):
        _, e = student
        m.add_element_link(Qualification(e["quick"], e[subject]))

    def test_qualification_clash(self, m, student):
        _, e = student
        m.add_element_link(Contribution(e["booked"], e["quick"], ContributionLevel.HELP))
        with pytest.raises(ContributionQualificationClash) as err:
            m.add_element_link(Qualification(e["quick"], e["booked"]))
        assert err.value.code == "E011"

    def test_contribution_after_qualification_clashes(self, m, student):
        _, e = student
        m.add_element_link(Qualification(e["quick"], e["booked"]))
        with pytest.raises(ContributionQualificationClash):
            m.add_element_link(Contribution(e["booked"], e["quick"], ContributionLevel.HELP))

    def test_cross_actor_link(self, m, student):
        _, e = student
        other = m.add_actor("IS", ActorKind.AGENT)
        fast = m.add_element(other, "Fast", Q)
        with pytest.raises(CrossActorLink):
            m.add_element_link(Contribution(e["bundle"], fast, ContributionLevel.HELP))


class TestDependencies:
    def test_fresh_dependum(self, m, student):
        a, e = student
        agency = m.add_actor("Travel agency", ActorKind.GENERIC)
        d = m.add_dependency(a, e["booked"], "Tickets booked", R, agency, None)
        dep = m.dependencies[d]
        dum = m.elements[dep.dependum]
        assert dum.is_dependum and dum.name == "Tickets booked" and dum.kind is R
        assert dep.dependee_elmt is None

    def test_both_endpoints_omitted(self, m, student):
        a, _ = student
        isys = m.add_actor("University IS", ActorKind.AGENT)
        d = m.add_dependency(a, None, "Fast processing", Q, isys, None)
        assert m.dependencies[d].depender_elmt is None

    def test_same_name_everywhere(self, m, student):
        a, e = student
        isys = m.add_actor("IS", ActorKind.AGENT)
        target = m.add_element(isys, "Trip authorized", G)
        m.add_dependency(a, e["authorized"], "Trip authorized", G, isys, target)

    def test_self_dependency(self, m, student):
        a, _ = student
        with pytest.raises(SelfDependency) as err:
            m.add_dependency(a, None, "X", G, a, None)
        assert err.value.code == "E007"

    def test_owner_mismatch(self, m, student):
        a, e = student
        other = m.add_actor("Agency", ActorKind.GENERIC)
        with pytest.raises(ElmtOwnerMismatch) as err:
            m.add_dependency(a, None, "X", G, other, e["booked"])
        assert err.value.code == "E006"
        with pytest.raises(ElmtOwnerMismatch) as err:
            m.add_dependency(other, e["booked"], "X", G, a, None)
        assert err.value.code == "E005"

    def test_dependum_as_endpoint(self, m, student):
        a, _ = student
        other = m.add_actor("Agency", ActorKind.GENERIC)
        d = m.add_dependency(a, None, "X", G, other, None)
        with pytest.raises(SharedDependum):
            m.add_dependency(a, m.dependencies[d].dependum, "Y", G, other, None)

    def test_failed_call_leaves_model_untouched(self, m, student):
        a, _ = student
        other = m.add_actor("Agency", ActorKind.GENERIC)
        before = m.copy()
        with pytest.raises(DuplicateId):
            m.add_dependency(a, None, "X", G, other, None, id="D1", dependum_id="D1")
        assert m == before


def test_structural_equality_ignores_ids():
    a, b = Model(), Model()
    a.add_actor("x", ActorKind.ROLE)
    b.add_actor("y", ActorKind.ROLE, id="Z")
    b.actors.clear()
    b.add_actor("x", ActorKind.ROLE, id="other")
    assert structurally_equal(a, b)
    b.add_actor("z", ActorKind.ROLE)
    assert not structurally_equal(a, b)


def test_copy_is_independent(travel_model):
    clone = travel_model.copy()
    clone.add_actor("extra", ActorKind.AGENT)
    assert len(clone.actors) == len(travel_model.actors) + 1


def test_referential_integrity_of_corpus(travel_model):
    assert travel_model.dangling_references() == []
