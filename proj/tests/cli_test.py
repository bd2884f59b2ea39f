#!/usr/bin/env python3
"""End-to-end tests of the thesee-mini command line tool."""

import argparse
import json
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

import jsonschema

CLI = None
ROOT = None

MODES = ["interference", "scheduled", "oracle-interleave", "oracle-scheduled", "oracle-interference", "fuzz"]
CORPUS = ["two_flags.conc", "parallel_increment.conc", "priority_islocked.conc", "producer_consumer.conc", "inter_thread_flow.conc"]


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("THESEE_MINI_COLOR", None)
    full_env.update(env or {})
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=full_env, timeout=120)


def corpus(name):
    return str(ROOT / "corpus" / name)


class AnalyzeTest(unittest.TestCase):
    def test_scheduled_priority_program(self):
        r = run("analyze", "--mode", "scheduled", corpus("priority_islocked.conc"))
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertIn("T ∈ [0,0]", r.stdout)

    def test_interference_priority_program(self):
        r = run("analyze", "--mode", "interference", corpus("priority_islocked.conc"))
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertIn("T ∈ [-1,1]", r.stdout)

    def test_default_mode_is_interference(self):
        r = run("analyze", corpus("priority_islocked.conc"), "--json")
        self.assertEqual(json.loads(r.stdout)["mode"], "interference")

    def test_alarms_exit_one(self):
        r = run("analyze", "--mode", "scheduled", corpus("inter_thread_flow.conc"))
        self.assertEqual(r.returncode, 1)
        self.assertIn("alarms: 2", r.stdout)

    def test_oracle_check_against(self):
        r = run("analyze", "--mode", "oracle-interleave", "--unroll", "2", corpus("inter_thread_flow.conc"),
                "--check-against", "scheduled", "--json")
        self.assertEqual(r.returncode, 0, r.stderr)
        report = json.loads(r.stdout)
        self.assertEqual(report["check"]["verdict"], "PASS")
        self.assertEqual(report["check"]["against"], "scheduled")

    def test_check_against_seq_on_single_thread(self):
        with tempfile.TemporaryDirectory() as d:
            src = Path(d) / "one.conc"
            src.write_text("var x = [-1,1];\nthread 1 { y <- 1 / x; }\n")
            r = run("analyze", "--mode", "oracle-interleave", str(src), "--check-against", "seq", "--json")
            self.assertEqual(r.returncode, 0, r.stderr)
            self.assertEqual(json.loads(r.stdout)["check"]["verdict"], "PASS")

    def test_bad_mode_is_usage_error(self):
        r = run("analyze", "--mode", "bogus", corpus("priority_islocked.conc"))
        self.assertEqual(r.returncode, 2)
        self.assertIn("bogus", r.stderr)

    def test_unknown_flag_is_usage_error(self):
        self.assertEqual(run("analyze", "--frobnicate", corpus("priority_islocked.conc")).returncode, 2)
        self.assertEqual(run().returncode, 2)

    def test_parse_error(self):
        with tempfile.TemporaryDirectory() as d:
            src = Path(d) / "bad.conc"
            src.write_text("thread 1 {\n  x <- ;\n}\n")
            r = run("analyze", str(src))
            self.assertEqual(r.returncode, 2)
            self.assertIn("2:", r.stderr)

    def test_missing_file(self):
        self.assertEqual(run("analyze", "/nonexistent/prog.conc").returncode, 2)

    def test_seq_rejects_threads(self):
        self.assertEqual(run("analyze", "--mode", "seq", corpus("priority_islocked.conc")).returncode, 2)

    def test_budget_exhaustion_exit_three(self):
        r = run("analyze", "--mode", "oracle-interleave", "--budget-states", "3", corpus("producer_consumer.conc"), "--json")
        self.assertEqual(r.returncode, 3)
        self.assertTrue(json.loads(r.stdout)["oracle"]["truncated"])

    def test_out_writes_file(self):
        with tempfile.TemporaryDirectory() as d:
            out = Path(d) / "r.json"
            r = run("analyze", corpus("priority_islocked.conc"), "--json", "--out", str(out))
            self.assertEqual(r.returncode, 0)
            self.assertEqual(r.stdout, "")
            self.assertEqual(json.loads(out.read_text())["program"]["variables"], ["T", "X", "Y", "Z"])

    def test_color(self):
        plain = run("analyze", "--mode", "scheduled", corpus("inter_thread_flow.conc"))
        colored = run("analyze", "--mode", "scheduled", corpus("inter_thread_flow.conc"), env={"THESEE_MINI_COLOR": "1"})
        off = run("analyze", "--mode", "scheduled", corpus("inter_thread_flow.conc"), env={"THESEE_MINI_COLOR": "0"})
        self.assertNotIn("\033[", plain.stdout)
        self.assertNotIn("\033[", off.stdout)
        self.assertIn("\033[31m", colored.stdout)

    def test_flags_are_echoed(self):
        r = run("analyze", "--mode", "scheduled", corpus("priority_islocked.conc"), "--json", "--no-mono", "--unroll", "4",
                "--widening-delay", "3", "--thresholds", "0,10", "--self-interference", "t2", "--budget-states",
                "500", "--seed", "9")
        cfg = json.loads(r.stdout)["config"]
        self.assertEqual(cfg["mono"], False)
        self.assertEqual(cfg["unroll"], 4)
        self.assertEqual(cfg["widening_delay"], 3)
        self.assertEqual(cfg["thresholds"], ["0", "10"])
        self.assertEqual(cfg["self_interference"], [2])
        self.assertEqual(cfg["budget_states"], 500)
        self.assertEqual(cfg["seed"], 9)


class ReportTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        schema = json.loads((ROOT / "schema" / "report.schema.json").read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        cls.validator = jsonschema.Draft202012Validator(schema)

    def test_reports_validate_against_schema(self):
        for prog in CORPUS:
            for mode in MODES:
                with self.subTest(program=prog, mode=mode):
                    r = run("analyze", "--mode", mode, "--unroll", "2", "--trials", "3", "--timing", "--json",
                            corpus(prog))
                    self.assertIn(r.returncode, (0, 1, 3), r.stderr)
                    report = json.loads(r.stdout)
                    self.validator.validate(report)
                    self.assertEqual(report["exit_code"], r.returncode)

    def test_seq_and_check_reports_validate(self):
        with tempfile.TemporaryDirectory() as d:
            src = Path(d) / "loop.conc"
            src.write_text("var x = 0;\nthread 1 { while x - 10 < 0 do { x <- x + 1; } y <- 1 / (x - 10); }\n")
            seq = json.loads(run("analyze", "--mode", "seq", "--json", str(src)).stdout)
            self.validator.validate(seq)
            checked = json.loads(run("analyze", "--mode", "oracle-scheduled", "--check-against", "seq", "--json",
                                     str(src)).stdout)
            self.validator.validate(checked)

    def test_reports_are_deterministic(self):
        for prog in CORPUS:
            for mode in ("interference", "scheduled", "oracle-interleave", "fuzz"):
                with self.subTest(program=prog, mode=mode):
                    a = run("analyze", "--mode", mode, "--unroll", "2", "--trials", "4", "--json", corpus(prog))
                    b = run("analyze", "--mode", mode, "--unroll", "2", "--trials", "4", "--json", corpus(prog))
                    self.assertEqual(a.stdout, b.stdout)

    def test_fixtures(self):
        manifest = json.loads((ROOT / "corpus" / "expected" / "manifest.json").read_text())
        self.assertGreaterEqual({f["program"] for f in manifest["fixtures"]}, set(CORPUS))
        for fx in manifest["fixtures"]:
            with self.subTest(report=fx["report"]):
                r = run("analyze", corpus(fx["program"]), "--json", *fx["args"])
                expected = (ROOT / "corpus" / "expected" / fx["report"]).read_text()
                self.assertEqual(json.loads(r.stdout), json.loads(expected))
                self.assertEqual(r.returncode, json.loads(expected)["exit_code"])


class DiffTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def report(self, name, *args, src=None):
        path = self.dir / name
        r = run("analyze", src or corpus("priority_islocked.conc"), "--json", "--out", str(path), *args)
        self.assertIn(r.returncode, (0, 1))
        return str(path)

    def test_identical_reports(self):
        a = self.report("a.json", "--mode", "scheduled")
        r = run("diff", a, a)
        self.assertEqual(r.returncode, 0)
        out = json.loads(r.stdout)
        self.assertTrue(out["alarms_a_in_b"] and out["alarms_b_in_a"])

    def test_scheduled_included_in_interference(self):
        src = self.dir / "guarded.conc"
        src.write_text((ROOT / "corpus" / "priority_islocked.conc").read_text().replace(
            "  unlock(m);\n}", "  unlock(m);\n  D <- 1 / (T + 1);\n}", 1))
        sched = self.report("s.json", "--mode", "scheduled", src=str(src))
        interf = self.report("i.json", "--mode", "interference", src=str(src))
        s_alarms = {a["label"] for a in json.loads(Path(sched).read_text())["alarms"]}
        i_alarms = {a["label"] for a in json.loads(Path(interf).read_text())["alarms"]}
        self.assertTrue(s_alarms < i_alarms)
        self.assertEqual(run("diff", "--subset", sched, interf).returncode, 0)
        self.assertEqual(run("diff", sched, interf).returncode, 1)
        self.assertEqual(run("diff", "--subset", interf, sched).returncode, 1)

    def test_different_programs(self):
        a = self.report("a.json")
        b = self.report("b.json", src=corpus("inter_thread_flow.conc"))
        r = run("diff", a, b)
        self.assertEqual(r.returncode, 2)

    def test_unreadable_report(self):
        bad = self.dir / "bad.json"
        bad.write_text("not json")
        self.assertEqual(run("diff", str(bad), str(bad)).returncode, 2)


def main():
    global CLI, ROOT
    parser = argparse.ArgumentParser()
    parser.add_argument("--cli", required=True)
    parser.add_argument("--root", required=True)
    args, rest = parser.parse_known_args()
    CLI = args.cli
    ROOT = Path(args.root)
    unittest.main(argv=[sys.argv[0], *rest], verbosity=2)


if __name__ == "__main__":
    main()
