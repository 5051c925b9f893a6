import pytest

from phishforge.applicability import (
    analyze_applicability,
    login_forms,
    provider_login_buttons,
)
from phishforge.dom import parse_document

from helpers import ANCHOR_PAGE, EMPTY_PAGE, LOGIN_PAGE

UNCONDITIONAL = {"C2", "C12", "V1", "V2"}


def applicable(markup: str) -> set[str]:
    return set(analyze_applicability(parse_document(markup)).applicable_ids())


def test_empty_page_unconditional_only():
    assert applicable(EMPTY_PAGE) == UNCONDITIONAL


def test_anchor_page_triggers_link_features():
    got = applicable(ANCHOR_PAGE)
    assert {"C1", "C3", "C4", "C5", "C10"} <= got
    assert got & {"C6", "C7", "C8", "C9", "C11", "V3", "V4", "V5"} == set()


def test_login_form_with_provider_button():
    markup = '<form><input type="password"></form><button>Sign in with Google</button>'
    got = applicable(markup)
    assert {"C7", "C8", "C9", "C11"} <= got


def test_login_form_without_provider_button():
    markup = '<form><input type="password"></form>'
    got = applicable(markup)
    assert {"C7", "C9", "C11"} <= got
    assert "C8" not in got


def test_password_input_outside_form_is_not_a_login_form():
    markup = '<input type="password"><form><input type="text"></form>'
    got = applicable(markup)
    assert got & {"C7", "C8", "C9", "C11"} == set()


def test_text_container_trigger():
    assert "C6" in applicable("<p>two words</p>")
    assert "C6" not in applicable("<p>single</p>")
    assert "C6" not in applicable("<div>two words</div>")  # not a C6 container


def test_logo_triggers_visual_features():
    got = applicable('<img src="logo.png">')
    assert {"V3", "V4", "V5"} <= got
    assert applicable('<img src="photo.jpg">') & {"V3", "V4", "V5"} == set()
    assert {"V3", "V4", "V5"} <= applicable('<img src="/brand/logo.svg?v=2">')


def test_full_login_page_report():
    report = analyze_applicability(parse_document(LOGIN_PAGE))
    got = set(report.applicable_ids())
    assert {"C1", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11"} <= got
    assert {"V3", "V4", "V5"} <= got
    assert report.counts["a"] == 1
    assert report.counts["form"] == 1
    assert report.counts["input_password"] == 1
    assert report.counts["iframe_capable"] == 1


def test_report_is_pure():
    tree = parse_document(LOGIN_PAGE)
    first = analyze_applicability(tree).to_dict()
    second = analyze_applicability(tree).to_dict()
    assert first == second


def test_evidence_nodes_exist_and_satisfy_predicates():
    tree = parse_document(LOGIN_PAGE)
    report = analyze_applicability(tree)
    for fid, entry in report.entries.items():
        if not entry.applicable and entry.evidence:
            pytest.fail(f"{fid} has evidence but is not applicable")
        for node_id, _reason in entry.evidence:
            assert tree.contains_id(node_id), f"{fid} evidence node missing"
    # independent re-check of one predicate: C7 evidence nodes are login forms
    form_ids = {f.node_id for f in login_forms(tree)}
    c7_nodes = {nid for nid, _ in report.entries["C7"].evidence}
    assert c7_nodes == form_ids


def test_unconditional_features_need_no_evidence():
    report = analyze_applicability(parse_document(EMPTY_PAGE))
    for fid in UNCONDITIONAL:
        assert report.entries[fid].applicable


def test_monotone_under_anchor_addition():
    base = "<html><body><a href='x'>x</a></body></html>"
    more = "<html><body><a href='x'>x</a><a href='y'>y</a></body></html>"
    assert "C1" in applicable(base)
    assert "C1" in applicable(more)


def test_provider_button_detection_variants():
    tree = parse_document(
        '<form><input type="password"></form>'
        '<a class="btn" title="Continue with GitHub">continue</a>'
    )
    assert provider_login_buttons(tree)
    tree2 = parse_document('<form><input type="password"></form><button>plain</button>')
    assert not provider_login_buttons(tree2)
