import copy
import json

import pytest

from subcubic_packing.certify import (
    FULLY_CHECKED,
    PAPER_TRUSTED,
    TABLE_1,
    Certificate,
    CertificateError,
    CertificationRefused,
    Claim,
    CertificateStep,
    certificate_json,
    certify_chi_rho_lower,
    check_certificate,
    check_midpoint_property,
    connector_distance_profile,
    disjoint_copies_bound,
    halves_summary,
    reproduce_table_1,
    singleton_color_threshold,
    verify_lemma,
    verify_theorem,
)
from subcubic_packing.families import ResourceCeilingError, build_G0, build_Gk, build_H


def brute_copies_bound(D, m, t):
    """Fewest colors N such that t copies, each using m distinct colors, fit when
    only colors < D may be reused across copies."""
    for n_colors in range(1, t * m + 1):
        shared = min(D - 1, n_colors)
        private = n_colors - shared
        # each copy takes up to `shared` reusable colors and the rest privately
        if n_colors >= m and t * max(0, m - shared) <= private:
            return n_colors
    return t * m


@pytest.mark.parametrize("D", range(1, 12))
@pytest.mark.parametrize("m", range(1, 14))
def test_disjoint_copies_bound_grid(D, m):
    assert disjoint_copies_bound(D, m) == brute_copies_bound(D, m, 2)
    if m >= D - 1:
        assert disjoint_copies_bound(D, m) == 2 * m - D + 1
    assert disjoint_copies_bound(D, m, 3) == brute_copies_bound(D, m, 3)


def test_disjoint_copies_examples():
    assert disjoint_copies_bound(6, 7) == 9
    assert disjoint_copies_bound(8, 9) == 11
    for k in range(1, 12):
        assert disjoint_copies_bound(2 * k + 6, 2 * k + 7) == 2 * k + 9
    with pytest.raises(ValueError):
        disjoint_copies_bound(0, 3)


def test_singleton_threshold():
    assert singleton_color_threshold(build_H().graph) == 4
    assert singleton_color_threshold(build_G0().graph) == 6


def test_certificate_k0_structure():
    cert = certify_chi_rho_lower(0)
    assert [s.rule for s in cert.steps] == ["SolverExhaustive", "DiameterBFS", "DisjointCopies"]
    assert cert.conclusion == Claim("ChiRhoLower", "G0", 9)
    assert cert.trust_level == FULLY_CHECKED
    assert cert.steps[1].evidence["computed_diameter"] == 6
    assert check_certificate(cert) == cert.conclusion


@pytest.mark.parametrize("k", [1, 2, 3])
def test_certificate_round_trip(k):
    cert = certify_chi_rho_lower(k)
    assert len(cert.steps) == 2 * k + 3
    text = certificate_json(cert)
    back = Certificate.from_dict(json.loads(text))
    assert back == cert
    assert check_certificate(back) == Claim("ChiRhoLower", f"G{k}", 2 * k + 9)


def _tampered(cert, mutate):
    data = copy.deepcopy(cert.to_dict())
    mutate(data)
    return Certificate.from_dict(data)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["steps"][0]["evidence"].update(nodes=d["steps"][0]["evidence"]["nodes"] + 1),
        lambda d: d["steps"][1]["evidence"].update(computed_diameter=5),
        lambda d: d["steps"][1]["claim"].update(value=5),
        lambda d: d["steps"][2]["claim"].update(value=10),
        lambda d: d["conclusion"].update(value=10),
        lambda d: d["steps"][2]["evidence"].update(map_digest="0" * 64),
        lambda d: d["steps"][2].update(premises=[1, 7]),
        lambda d: d["steps"][2].update(rule="Magic"),
        lambda d: d.update(trust_level=PAPER_TRUSTED),
        lambda d: d["steps"][0]["claim"].update(value=8),
    ],
)
def test_tampering_is_detected(mutate):
    cert = certify_chi_rho_lower(0)
    with pytest.raises(CertificateError):
        check_certificate(_tampered(cert, mutate))


def test_paper_trusted_steps_need_permission():
    cert = certify_chi_rho_lower(2, k_max_diam=1, allow_paper_trusted=True)
    assert cert.trust_level == PAPER_TRUSTED
    assert cert.steps[-2].rule == "PaperTrusted"
    with pytest.raises(CertificationRefused):
        check_certificate(cert)
    assert check_certificate(cert, allow_paper_trusted=True).value == 13


def test_refusals():
    with pytest.raises(CertificationRefused):
        certify_chi_rho_lower(9)
    with pytest.raises(ResourceCeilingError):
        certify_chi_rho_lower(40, allow_paper_trusted=True)
    with pytest.raises(ValueError):
        certify_chi_rho_lower(-1)
    with pytest.raises(CertificateError):
        Claim("Bogus", "H", 1)
    with pytest.raises(CertificateError):
        check_certificate(Certificate([], Claim("ChiRhoLower", "H", 1), FULLY_CHECKED))


def test_counting_rule_is_replayed():
    good = CertificateStep(1, Claim("ChiRhoLower", "H", 4), "CountingBound")
    assert check_certificate(Certificate([good], good.claim, FULLY_CHECKED)).value == 4
    bad = CertificateStep(1, Claim("ChiRhoLower", "H", 7), "CountingBound")
    with pytest.raises(CertificateError):
        check_certificate(Certificate([bad], bad.claim, FULLY_CHECKED))


def test_midpoint_scan():
    g0 = build_G0()
    scan = check_midpoint_property(g0, 6, 2)
    assert scan.holds and scan.threshold == 6
    assert len(scan.witnesses) == 35 * 35
    weaker = check_midpoint_property(g0, 5, 2)
    assert not weaker.holds
    # independent recheck of every recorded witness
    from subcubic_packing.graph import all_pairs_distances

    dm = all_pairs_distances(g0.graph)
    for (z, w), (y, dz, dw) in scan.witnesses.items():
        assert g0.graph.degree(y) == 2
        assert (dm(z, y), dm(w, y)) == (dz, dw)
        assert dz + dw <= 6
    step = CertificateStep(1, Claim("MidpointProperty", "G0", 6, 2), "MidpointScan")
    assert check_certificate(Certificate([step], step.claim, FULLY_CHECKED)).kind == "MidpointProperty"


def test_table_rows():
    rows = reproduce_table_1()
    assert len(rows) == len(TABLE_1) == 8
    assert all(r["match"] for r in rows)
    assert [r["computed"] for r in rows] == [[r[3], r[4]] for r in TABLE_1]


def test_connector_profile():
    profile = connector_distance_profile()
    assert sum(profile.values()) == 30
    assert max(profile) == 4


@pytest.mark.parametrize("lemma", [1, 2, 3, 4, 5])
def test_lemmas_pass(lemma):
    rep = verify_lemma(lemma)
    assert rep.passed, rep.checks
    json.dumps(rep.to_dict())


def test_lemma_details():
    two = verify_lemma(2).checks[0]["evidence"]
    assert two["diameter"] == 6
    assert two["eccentricity_profile"] == {5: 7, 6: 28}
    one = verify_lemma(1).checks
    assert all(c["evidence"]["status"] == "UNSAT" for c in one[:2])
    with pytest.raises(ValueError):
        verify_lemma(6)


def test_theorem_and_halves():
    rep = verify_theorem(2)
    assert rep.passed and rep.checks[0]["evidence"]["diameter"] == 10
    assert halves_summary(build_Gk(2)) == {"half_sizes": [75, 75], "roots": ["A()", "B()", "C()", "D()", "X()"]}
    with pytest.raises(ValueError):
        verify_theorem(0)
