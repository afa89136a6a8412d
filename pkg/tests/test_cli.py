"""Command-line front-end tests.

Each command is driven through cli.main(argv) in process; stdout is
captured with capsys and files go under tmp_path.  Expected values are
frozen independently of the implementation: report coefficients come from
the hand-checked fifteen-row table (see test_bounds), region vertices from
the closed forms, and exit codes from the documented mapping
0 ok / 1 violation-or-diff / 2 schema / 3 cut / 4 unbounded.
"""

import json
from fractions import Fraction as F

import pytest

from cutbounds import cli
from cutbounds.errors import SchemaError

# ---------------------------------------------------------------------------
# fixtures


def write_doc(tmp_path, obj, name="net.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def k1_doc():
    return {
        "nodes": ["s", "v1", "t1"],
        "arcs": [
            {"from": "s", "to": "v1", "capacity": "1"},
            {"from": "v1", "to": "t1", "capacity": "inf"},
        ],
        "source": "s",
        "sinks": ["t1"],
        "messages": ["W1"],
        "demands": {"t1": ["W1"]},
    }


def complete3_doc():
    """The three-sink complete-message combination network as a document.

    Source arcs come first in size-then-lex subset order, so they receive
    the automatic labels a0..a6 in the pattern order (1,2,3,12,13,23,123).
    """
    subsets = ["1", "2", "3", "12", "13", "23", "123"]
    nodes = ["s"] + [f"v{u}" for u in subsets] + ["t1", "t2", "t3"]
    arcs = [{"from": "s", "to": f"v{u}", "capacity": "1"} for u in subsets]
    for k in "123":
        for u in subsets:
            if k in u:
                arcs.append({"from": f"v{u}", "to": f"t{k}", "capacity": "inf"})
    messages = [f"W{u}" for u in subsets]
    demands = {
        f"t{k}": [f"W{u}" for u in subsets if k in u] for k in "123"
    }
    return {
        "nodes": nodes,
        "arcs": arcs,
        "source": "s",
        "sinks": ["t1", "t2", "t3"],
        "messages": messages,
        "demands": demands,
    }


def two_sink_doc(extra_message=False):
    messages = ["WA", "WB"] + (["WC"] if extra_message else [])
    return {
        "nodes": ["s", "u", "v", "t1", "t2"],
        "arcs": [
            {"from": "s", "to": "u", "capacity": "1"},
            {"from": "s", "to": "v", "capacity": "2"},
            {"from": "u", "to": "t1", "capacity": "inf"},
            {"from": "v", "to": "t2", "capacity": "inf"},
        ],
        "source": "s",
        "sinks": ["t1", "t2"],
        "messages": messages,
        "demands": {"t1": ["WA"], "t2": ["WB"]},
    }


# provenance -> weight pattern over (W1,W2,W3,W12,W13,W23,W123) and the
# matching source arcs; copied from the hand-verified table in test_bounds
PATTERNS = {
    "csb({1})": (1, 0, 0, 1, 1, 0, 1),
    "csb({2})": (0, 1, 0, 1, 0, 1, 1),
    "csb({3})": (0, 0, 1, 0, 1, 1, 1),
    "csb({1,2})": (1, 1, 0, 1, 1, 1, 1),
    "csb({1,3})": (1, 0, 1, 1, 1, 1, 1),
    "csb({2,3})": (0, 1, 1, 1, 1, 1, 1),
    "csb({1,2,3})": (1, 1, 1, 1, 1, 1, 1),
    "gcsb3a(1,2,3)": (1, 1, 1, 2, 1, 1, 2),
    "gcsb3a(1,3,2)": (1, 1, 1, 1, 2, 1, 2),
    "gcsb3a(2,3,1)": (1, 1, 1, 1, 1, 2, 2),
    "gcsb3b(1,2,3)": (1, 1, 1, 2, 2, 2, 2),
    "gcsb3c(1,2,3)": (2, 2, 1, 2, 2, 2, 3),
    "gcsb3c(1,3,2)": (2, 1, 2, 2, 2, 2, 3),
    "gcsb3c(2,3,1)": (1, 2, 2, 2, 2, 2, 3),
    "gcsb3d(1,2,3)": (2, 2, 2, 2, 2, 2, 3),
}

MESSAGES3 = ("W1", "W2", "W3", "W12", "W13", "W23", "W123")
DOC_ARCS3 = ("a0", "a1", "a2", "a3", "a4", "a5", "a6")


# ---------------------------------------------------------------------------
# document parsing


class TestNetworkDocument:
    def test_roundtrip(self, tmp_path):
        net = cli.load_network_document(write_doc(tmp_path, k1_doc()))
        assert net.K == 1
        assert [a.label for a in net.arcs] == ["a0", "a1"]
        assert net.arc("a1").capacity is None
        assert net.demand_set(1).member_labels() == ("W1",)

    def test_unknown_top_level_key(self, tmp_path):
        doc = k1_doc()
        doc["comment"] = "hello"
        with pytest.raises(SchemaError):
            cli.load_network_document(write_doc(tmp_path, doc))

    def test_missing_key(self, tmp_path):
        doc = k1_doc()
        del doc["messages"]
        with pytest.raises(SchemaError):
            cli.load_network_document(write_doc(tmp_path, doc))

    def test_unknown_arc_key(self, tmp_path):
        doc = k1_doc()
        doc["arcs"][0]["weight"] = "1"
        with pytest.raises(SchemaError):
            cli.load_network_document(write_doc(tmp_path, doc))

    def test_numeric_capacity_rejected(self, tmp_path):
        doc = k1_doc()
        doc["arcs"][0]["capacity"] = 1
        with pytest.raises(SchemaError):
            cli.load_network_document(write_doc(tmp_path, doc))

    def test_garbage_capacity_rejected(self, tmp_path):
        doc = k1_doc()
        doc["arcs"][0]["capacity"] = "five"
        with pytest.raises(SchemaError):
            cli.load_network_document(write_doc(tmp_path, doc))

    def test_fractional_capacity(self, tmp_path):
        doc = k1_doc()
        doc["arcs"][0]["capacity"] = "2/3"
        net = cli.load_network_document(write_doc(tmp_path, doc))
        assert net.arc("a0").capacity == F(2, 3)

    def test_demands_must_cover_sinks(self, tmp_path):
        doc = two_sink_doc()
        del doc["demands"]["t2"]
        with pytest.raises(SchemaError):
            cli.load_network_document(write_doc(tmp_path, doc))

    def test_demand_key_must_be_sink(self, tmp_path):
        doc = two_sink_doc()
        doc["demands"]["u"] = ["WA"]
        with pytest.raises(SchemaError):
            cli.load_network_document(write_doc(tmp_path, doc))

    def test_non_object_document(self, tmp_path):
        path = tmp_path / "net.json"
        path.write_text("[1, 2]")
        with pytest.raises(SchemaError):
            cli.load_network_document(str(path))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "net.json"
        path.write_text("{nope")
        with pytest.raises(SchemaError):
            cli.load_network_document(str(path))


# ---------------------------------------------------------------------------
# bounds


class TestCmdBounds:
    def test_k1_report_exact(self, tmp_path, capsys):
        code = cli.main(["bounds", write_doc(tmp_path, k1_doc())])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report == [
            {
                "provenance": "csb({1})",
                "rate_coeffs": {"W1": "1"},
                "capacity_coeffs": {"a0": "1"},
                "rhs_value": "1",
            }
        ]

    def test_k3_complete_fifteen_rows(self, tmp_path, capsys):
        path = write_doc(tmp_path, complete3_doc())
        code = cli.main(["bounds", path, "--rules", "csb,gcsb3"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert len(report) == 15
        by_prov = {row["provenance"]: row for row in report}
        assert set(by_prov) == set(PATTERNS)
        for prov, pattern in PATTERNS.items():
            row = by_prov[prov]
            rates = {
                m: str(w) for m, w in zip(MESSAGES3, pattern) if w
            }
            caps = {a: str(w) for a, w in zip(DOC_ARCS3, pattern) if w}
            assert row["rate_coeffs"] == rates, prov
            assert row["capacity_coeffs"] == caps, prov
            assert row["rhs_value"] == str(sum(pattern)), prov

    def test_default_rules_match_explicit(self, tmp_path, capsys):
        path = write_doc(tmp_path, complete3_doc())
        assert cli.main(["bounds", path]) == 0
        default = capsys.readouterr().out
        assert cli.main(["bounds", path, "--rules", "csb,gcsb3"]) == 0
        assert capsys.readouterr().out == default

    def test_rows_sorted_by_signature(self, tmp_path, capsys):
        path = write_doc(tmp_path, complete3_doc())
        assert cli.main(["bounds", path]) == 0
        report = json.loads(capsys.readouterr().out)

        def key(row):
            return (
                sorted((m, F(v)) for m, v in row["rate_coeffs"].items()),
                sorted((a, F(v)) for a, v in row["capacity_coeffs"].items()),
            )

        keys = [key(row) for row in report]
        assert keys == sorted(keys)

    def test_cor2_rule(self, tmp_path, capsys):
        path = write_doc(tmp_path, two_sink_doc())
        code = cli.main(["bounds", path, "--rules", "cor2"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        provs = [row["provenance"] for row in report]
        # the Q={2} pair bound scales to the plain pair bound, and with
        # disjoint demands level 2 is empty, so its signature collides
        # with the Q={} row and only the first origin survives
        assert provs == [
            "cor2({1}, Q={})",
            "cor2({1,2}, Q={})",
            "cor2({2}, Q={})",
        ]

    def test_thm2_rule_subsumes_csb(self, tmp_path, capsys):
        path = write_doc(tmp_path, two_sink_doc())
        assert cli.main(["bounds", path, "--rules", "csb"]) == 0
        csb_rows = json.loads(capsys.readouterr().out)
        assert cli.main(["bounds", path, "--rules", "thm2"]) == 0
        thm2_rows = json.loads(capsys.readouterr().out)

        def sig(row):
            return (
                tuple(sorted((m, F(v)) for m, v in row["rate_coeffs"].items())),
                tuple(sorted((a, F(v)) for a, v in row["capacity_coeffs"].items())),
            )

        assert {sig(r) for r in csb_rows} <= {sig(r) for r in thm2_rows}

    def test_unknown_rule_exit2(self, tmp_path):
        path = write_doc(tmp_path, k1_doc())
        assert cli.main(["bounds", path, "--rules", "csb,banana"]) == 2

    def test_out_file_and_determinism(self, tmp_path):
        path = write_doc(tmp_path, complete3_doc())
        out1 = tmp_path / "r1.json"
        out2 = tmp_path / "r2.json"
        assert cli.main(["bounds", path, "--out", str(out1)]) == 0
        assert cli.main(["bounds", path, "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_cuts_file(self, tmp_path, capsys):
        path = write_doc(tmp_path, k1_doc())
        cuts = tmp_path / "cuts.json"
        cuts.write_text(json.dumps({"t1": ["a0"]}))
        assert cli.main(["bounds", path, "--cuts", str(cuts)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report[0]["capacity_coeffs"] == {"a0": "1"}

    def test_bad_cut_exit3_no_output(self, tmp_path):
        doc = two_sink_doc()
        path = write_doc(tmp_path, doc)
        cuts = tmp_path / "cuts.json"
        # a1 feeds t2, so it does not disconnect t1
        cuts.write_text(json.dumps({"t1": ["a1"], "t2": ["a1"]}))
        out = tmp_path / "report.json"
        code = cli.main(["bounds", path, "--cuts", str(cuts), "--out", str(out)])
        assert code == 3
        assert not out.exists()

    def test_schema_error_exit2_no_output(self, tmp_path):
        doc = k1_doc()
        doc["arcs"][0]["capacity"] = "-1"
        path = write_doc(tmp_path, doc)
        out = tmp_path / "report.json"
        assert cli.main(["bounds", path, "--out", str(out)]) == 2
        assert not out.exists()

    def test_missing_file_exit2(self, tmp_path):
        assert cli.main(["bounds", str(tmp_path / "absent.json")]) == 2


# ---------------------------------------------------------------------------
# verify


class TestCmdVerify:
    def entropy_run(self, token, capsys, trials="40", extra=()):
        code = cli.main(
            ["verify", "--lemma", token, "--trials", trials, "--seed", "11"]
            + list(extra)
        )
        out = capsys.readouterr().out
        return code, out

    @pytest.mark.parametrize("token", ["1", "2", "cor1", "multiway"])
    def test_gap_campaigns_clean(self, token, capsys):
        code, out = self.entropy_run(token, capsys)
        assert code == 0
        assert "violations=0" in out
        assert "backend=entropy" in out
        gap = float(out.split("min_gap=")[1].split()[0])
        assert gap >= -1e-9

    @pytest.mark.parametrize("token", ["1", "2", "cor1", "multiway"])
    def test_modular_gap_exactly_zero(self, token, capsys):
        code, out = self.entropy_run(token, capsys, extra=["--modular"])
        assert code == 0
        assert "backend=modular" in out
        assert "min_gap=0 " in out or out.rstrip().endswith("min_gap=0")
        assert "violations=0" in out

    def test_appendix_a(self, capsys):
        code = cli.main(
            ["verify", "--lemma", "appendixA", "--trials", "25", "--seed", "3"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "failures=0" in out

    def test_appendix_c_sweep_count(self, capsys):
        code = cli.main(["verify", "--lemma", "appendixC"])
        out = capsys.readouterr().out
        assert code == 0
        # sum over nonempty Q within {2..8} of (max(Q) - 1) checks
        assert "checked=769" in out
        assert "failures=0" in out

    def test_modular_rejected_for_identities(self, capsys):
        assert cli.main(["verify", "--lemma", "appendixA", "--modular"]) == 2
        capsys.readouterr()
        assert cli.main(["verify", "--lemma", "appendixC", "--modular"]) == 2

    def test_unknown_token_exit2(self, capsys):
        assert cli.main(["verify", "--lemma", "lemma9"]) == 2

    def test_bad_trials_exit2(self, capsys):
        assert cli.main(["verify", "--lemma", "1", "--trials", "0"]) == 2

    def test_seeded_determinism(self, capsys):
        _, first = self.entropy_run("1", capsys)
        _, second = self.entropy_run("1", capsys)
        assert first == second

    def test_tolerance_flag(self, capsys):
        code, out = self.entropy_run("1", capsys, extra=["--tolerance", "1e-6"])
        assert code == 0
        assert "tolerance=1e-06" in out


# ---------------------------------------------------------------------------
# region


class TestCmdRegion:
    def test_symmetric_unit_gcsb_csv(self, tmp_path):
        out = tmp_path / "v.csv"
        code = cli.main(
            ["region", "--symmetric", "3", "1", "1", "1", "--emit", str(out)]
        )
        assert code == 0
        assert out.read_text() == "x,y\n0,0\n4,0\n3,3\n1,6\n0,7\n"

    def test_symmetric_unit_cutset_csv(self, tmp_path):
        out = tmp_path / "v.csv"
        code = cli.main(
            [
                "region",
                "--symmetric", "3", "1", "1", "1",
                "--bounds", "cutset",
                "--emit", str(out),
            ]
        )
        assert code == 0
        assert out.read_text() == "x,y\n0,0\n4,0\n5/2,9/2\n0,7\n"

    def test_symmetric_zero_caps_single_vertex(self, tmp_path):
        out = tmp_path / "v.csv"
        code = cli.main(
            ["region", "--symmetric", "2", "0", "0", "--emit", str(out)]
        )
        assert code == 0
        assert out.read_text() == "x,y\n0,0\n"

    def test_csv_to_stdout(self, capsys):
        code = cli.main(["region", "--symmetric", "1", "1"])
        assert code == 0
        # K=1: single bound R0 + Rsp <= C1
        assert capsys.readouterr().out == "x,y\n0,0\n1,0\n0,1\n"

    def test_compare_verdicts(self, tmp_path, capsys):
        out = tmp_path / "v.csv"
        code = cli.main(
            [
                "region",
                "--symmetric", "3", "1", "1", "1",
                "--compare", "cutset",
                "--emit", str(out),
            ]
        )
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert "cutset contains gcsb: yes" in lines
        assert "gcsb contains cutset: no" in lines

    def test_file_network_region(self, tmp_path):
        path = write_doc(tmp_path, two_sink_doc())
        out = tmp_path / "v.csv"
        code = cli.main(
            ["region", path, "--axes", "WA,WB", "--emit", str(out)]
        )
        assert code == 0
        assert out.read_text() == "x,y\n0,0\n1,0\n1,2\n0,2\n"

    def test_unconstrained_message_unbounded_exit4(self, tmp_path, capsys):
        path = write_doc(tmp_path, two_sink_doc(extra_message=True))
        out = tmp_path / "v.csv"
        code = cli.main(
            ["region", path, "--axes", "WA,WC", "--emit", str(out)]
        )
        assert code == 4
        assert not out.exists()
        assert "unbounded" in capsys.readouterr().err

    def test_unknown_axis_exit2(self, tmp_path):
        path = write_doc(tmp_path, two_sink_doc())
        assert cli.main(["region", path, "--axes", "WA,WZ"]) == 2

    def test_symmetric_capacity_count_mismatch_exit2(self):
        assert cli.main(["region", "--symmetric", "3", "1", "1"]) == 2

    def test_requires_some_input(self):
        assert cli.main(["region"]) == 2


# ---------------------------------------------------------------------------
# paper


class TestCmdPaper:
    @pytest.mark.parametrize(
        "case", ["k3-complete", "k3-symmetric", "fm-derivation"]
    )
    def test_golden_match(self, case, capsys):
        code = cli.main(["paper", "--case", case])
        out = capsys.readouterr().out
        assert code == 0
        assert f"{case}: match" in out

    def test_unknown_case_exit2(self):
        assert cli.main(["paper", "--case", "k9"]) == 2

    def test_mismatch_reports_diff(self, capsys, monkeypatch):
        doctored = json.loads(cli._load_golden("k3_complete.json"))
        doctored["rows"][0]["rate_coeffs"] = {"W1": "7"}
        monkeypatch.setattr(
            cli, "_load_golden", lambda name: json.dumps(doctored)
        )
        code = cli.main(["paper", "--case", "k3-complete"])
        out = capsys.readouterr().out
        assert code == 1
        assert "MISMATCH" in out

    def test_golden_documents_row13_discrepancy(self):
        golden = json.loads(cli._load_golden("k3_complete.json"))
        assert "symmetric" in golden["note"]
        assert len(golden["rows"]) == 15

    def test_symmetric_golden_content(self):
        golden = json.loads(cli._load_golden("k3_symmetric.json"))
        assert golden["corner_points"] == [
            ["4", "0"], ["3", "3"], ["1", "6"], ["0", "7"]
        ]
        assert golden["vertices"] == [
            ["0", "0"], ["4", "0"], ["3", "3"], ["1", "6"], ["0", "7"]
        ]

    def test_fm_golden_content(self):
        golden = json.loads(cli._load_golden("fm_derivation.json"))
        assert golden["rows"] == [
            {
                "rate": {"R0": "1", "Rsp": "1"},
                "capacity": {"C1": "3", "C2": "3", "C3": "1"},
            },
            {
                "rate": {"R0": "2", "Rsp": "1"},
                "capacity": {"C1": "3", "C2": "5", "C3": "2"},
            },
            {
                "rate": {"R0": "3", "Rsp": "1"},
                "capacity": {"C1": "3", "C2": "6", "C3": "3"},
            },
        ]


# ---------------------------------------------------------------------------
# top-level plumbing


class TestMain:
    def test_no_arguments_exit2(self):
        assert cli.main([]) == 2

    def test_unknown_subcommand_exit2(self):
        assert cli.main(["frobnicate"]) == 2

    def test_entrypoint_exists(self):
        assert callable(cli.entrypoint)
