#!/usr/bin/env python3
"""End-to-end checks of the twistlab command line: schemas, exit codes, determinism."""

import json
import pathlib
import subprocess
import sys
import tempfile
import unittest

try:
    import jsonschema
except ImportError:
    jsonschema = None

CLI = None
SCHEMA_DIR = None


def run(*args, cwd=None):
    return subprocess.run([CLI, *args], cwd=cwd, capture_output=True, text=True)


def load_schema(name):
    return json.loads((SCHEMA_DIR / name).read_text())


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = pathlib.Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def validate(self, doc, schema_name):
        if jsonschema is None:
            self.skipTest("jsonschema not installed")
        jsonschema.validate(doc, load_schema(schema_name))

    def orbit_pipeline(self, out):
        out.mkdir(parents=True, exist_ok=True)
        orbit = out / "run.orbit.json"
        steps = [
            ["orbit", "--K", "1.2", "--depth", "7"],
            ["green", "--K", "1.2", "--orbit", str(orbit)],
            ["lyapunov", "--K", "1.2", "--orbit", str(orbit)],
            ["cone", "--K", "1.2", "--orbit", str(orbit)],
            ["conjugacy", "--K", "1.2", "--orbit", str(orbit)],
        ]
        for step in steps:
            r = run(*step, "-o", str(out))
            self.assertEqual(r.returncode, 0, f"{step}: {r.stderr}")
        return orbit

    def test_orbit_document_matches_schema(self):
        orbit = self.orbit_pipeline(self.tmp / "a")
        doc = json.loads(orbit.read_text())
        self.validate(doc, "orbit.schema.json")
        self.assertEqual(list(doc)[:8], ["format", "version", "family", "K", "rho", "thetas", "rs", "diagnostics"])
        for block in ("green", "cocycle", "cone", "conjugacy"):
            self.assertIn(block, doc)
        self.assertEqual(doc["rho"]["convergent"], {"p": 21, "q": 34})
        self.assertEqual(len(doc["thetas"]), 34)

    def test_rational_orbit(self):
        r = run("orbit", "--K", "0.5", "--rho", "1/2", "-o", str(self.tmp))
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads((self.tmp / "run.orbit.json").read_text())
        self.validate(doc, "orbit.schema.json")
        self.assertEqual(doc["rho"], {"p": 1, "q": 2})

    def test_reruns_are_byte_identical(self):
        a = self.orbit_pipeline(self.tmp / "a")
        b = self.orbit_pipeline(self.tmp / "b")
        self.assertEqual(a.read_bytes(), b.read_bytes())
        self.assertEqual((self.tmp / "a" / "run.cone.csv").read_bytes(), (self.tmp / "b" / "run.cone.csv").read_bytes())

    def test_scan_is_deterministic_across_thread_counts(self):
        outputs = []
        for run_dir, threads in (("s1", "1"), ("s4", "4")):
            out = self.tmp / run_dir
            r = run("scan", "--K-min", "0.5", "--K-max", "1.5", "--K-step", "0.5", "--depth", "6",
                    "--threads", threads, "-o", str(out))
            self.assertEqual(r.returncode, 0, r.stderr)
            outputs.append((out / "run.scan.csv").read_bytes())
        self.assertEqual(outputs[0], outputs[1])
        lines = outputs[0].decode().splitlines()
        self.assertEqual(len(lines), 4)

    def test_verify_report(self):
        out = self.tmp / "verify.json"
        r = run("verify", "--level", "quick", "--output", str(out))
        self.assertEqual(r.returncode, 0, r.stdout[-2000:])
        doc = json.loads(out.read_text())
        self.validate(doc, "verify.schema.json")
        self.assertTrue(doc["passed"])
        self.assertEqual(json.loads(r.stdout), doc)

    def test_verify_detects_injected_faults(self):
        for fault in ("det-breaking", "twist-breaking"):
            r = run("verify", "--level", "quick", "--inject", fault)
            self.assertEqual(r.returncode, 1, fault)
            doc = json.loads(r.stdout)
            self.validate(doc, "verify.schema.json")
            self.assertFalse(doc["passed"])
            self.assertTrue(doc["failures"])

    def test_bad_input_exits_with_2(self):
        cases = [
            ["orbit", "--rho", "abc"],
            ["orbit", "--rho", "1/0"],
            ["orbit", "--K", "-1"],
            ["orbit", "--set", "map.nonsense=1"],
            ["verify", "--level", "medium"],
            ["frobnicate"],
        ]
        for args in cases:
            r = run(*args, "-o", str(self.tmp)) if args[0] == "orbit" else run(*args)
            self.assertEqual(r.returncode, 2, f"{args}: {r.stderr}")

    def test_bad_config_file_exits_with_2(self):
        cfg = self.tmp / "bad.ini"
        cfg.write_text("[map]\nK = not-a-number\n")
        r = run("orbit", "--config", str(cfg), "-o", str(self.tmp))
        self.assertEqual(r.returncode, 2, r.stderr)

        missing = self.tmp / "missing.orbit.json"
        r = run("green", "--orbit", str(missing), "-o", str(self.tmp))
        self.assertEqual(r.returncode, 2, r.stderr)

    def test_malformed_orbit_document_exits_with_2(self):
        orbit = self.tmp / "broken.orbit.json"
        orbit.write_text(json.dumps({"format": "twistlab.orbit", "version": 1}))
        r = run("green", "--orbit", str(orbit), "-o", str(self.tmp))
        self.assertEqual(r.returncode, 2, r.stderr)

    def test_cone_on_sparse_orbit_exits_with_1(self):
        r = run("orbit", "--K", "1.2", "--depth", "3", "-o", str(self.tmp))
        self.assertEqual(r.returncode, 0, r.stderr)
        r = run("cone", "--K", "1.2", "--orbit", str(self.tmp / "run.orbit.json"), "-o", str(self.tmp))
        self.assertEqual(r.returncode, 1, r.stderr)
        self.assertIn("deepen", r.stderr)


if __name__ == "__main__":
    if len(sys.argv) < 3:
        sys.exit("usage: test_cli.py <twistlab> <schema-dir>")
    CLI = sys.argv[1]
    SCHEMA_DIR = pathlib.Path(sys.argv[2])
    unittest.main(argv=[sys.argv[0], "-v"])
