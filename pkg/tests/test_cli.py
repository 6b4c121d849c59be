"""Command-line interface tests: documents, exit codes, report stability."""

import json
import pathlib
import subprocess
import sys
import tempfile
import unittest

import numpy as np

from cpmaps import MalformedDocument, maps_close, serialize
from cpmaps.gallery import flip_twirl_map, random_cp_map

DATA = pathlib.Path(__file__).parent / "data"


def run_cli(*args, cwd=DATA):
    proc = subprocess.run(
        [sys.executable, "-m", "cpmaps", *args],
        capture_output=True, text=True, cwd=cwd,
    )
    return proc.returncode, proc.stdout, proc.stderr


class SerializationTests(unittest.TestCase):

    def test_matrix_round_trip(self):
        m = np.array([[1.0, 2j], [-1.5, 0.25 + 0.75j]])
        doc = serialize.encode_matrix(m)
        self.assertTrue(np.array_equal(serialize.decode_matrix(doc), m))

    def test_map_round_trip_keeps_kraus_and_choi(self):
        phi = flip_twirl_map()
        doc = serialize.encode_map(phi)
        self.assertIn("kraus", doc)
        self.assertIn("choi", doc)
        back = serialize.decode_map(doc)
        self.assertTrue(maps_close(phi, back))
        self.assertEqual(len(back.kraus), 2)

    def test_map_document_without_kraus(self):
        phi = random_cp_map(2, 3, 2, seed=0)
        doc = serialize.encode_map(phi)
        del doc["kraus"]
        back = serialize.decode_map(doc)
        self.assertTrue(maps_close(phi, back))

    def test_inconsistent_document_rejected(self):
        phi = flip_twirl_map()
        doc = serialize.encode_map(phi)
        doc["choi"][0][0] = [5.0, 0.0]  # no longer matches the kraus data
        with self.assertRaises(MalformedDocument):
            serialize.decode_map(doc)

    def test_malformed_matrices_rejected(self):
        for bad in (
            [[1.0]],                        # entry is not an [re, im] pair
            [[[1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]],  # ragged rows
            [[[float("nan"), 0.0]]],        # non-finite
            "nonsense",
        ):
            with self.assertRaises(MalformedDocument):
                serialize.decode_matrix(bad)

    def test_partial_map_round_trip(self):
        from cpmaps import PartialCpMap
        phi = flip_twirl_map()
        r = np.diag([1.0, 0.0])
        beta = PartialCpMap.from_map(phi, r)
        doc = serialize.encode_partial_map(beta)
        back = serialize.decode_partial_map(doc, r)
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        self.assertTrue(np.allclose(back.evaluate(x), beta.evaluate(x)))


class ExitCodeTests(unittest.TestCase):

    def test_analyze_cp_map(self):
        code, out, _ = run_cli("analyze", "eb_map.json")
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertTrue(report["is_cp"])
        self.assertEqual(report["choi_rank"], 2)
        self.assertTrue(report["is_entanglement_breaking_quasipure_form"])

    def test_analyze_non_cp_map_still_succeeds(self):
        code, out, _ = run_cli("analyze", "transpose_map.json")
        self.assertEqual(code, 0)  # the analysis itself succeeded
        report = json.loads(out)
        self.assertFalse(report["is_cp"])
        spectrum = [entry for entry in report["choi_spectrum"]]
        self.assertLess(min(spectrum), 0.0)

    def test_quasipure_verdict_exit_codes(self):
        self.assertEqual(run_cli("quasipure", "eb_map.json")[0], 0)
        code, out, _ = run_cli("quasipure", "special_map.json")
        self.assertEqual(code, 1)
        report = json.loads(out)
        self.assertEqual(report["status"], "NotQuasiPure")
        self.assertIsNotNone(report["witness"])

    def test_quasipure_inconclusive_exit_code(self):
        code, out, _ = run_cli("quasipure", "inconclusive_map.json")
        self.assertEqual(code, 3)
        self.assertEqual(json.loads(out)["status"], "Inconclusive")
        code, out, _ = run_cli("quasipure", "inconclusive_map.json",
                               "--no-strict")
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["status"], "QuasiPure")

    def test_quasipure_rejects_non_cp_input(self):
        code, out, err = run_cli("quasipure", "transpose_map.json")
        self.assertEqual(code, 1)
        self.assertIn("NotCP", out + err)

    def test_missing_and_malformed_files_exit_2(self):
        self.assertEqual(run_cli("analyze", "no_such_file.json")[0], 2)
        with tempfile.NamedTemporaryFile("w", suffix=".json",
                                         delete=False) as handle:
            handle.write("{ not json")
            path = handle.name
        self.assertEqual(run_cli("analyze", path)[0], 2)
        with tempfile.NamedTemporaryFile("w", suffix=".json",
                                         delete=False) as handle:
            json.dump({"d_in": 2}, handle)
            path = handle.name
        self.assertEqual(run_cli("analyze", path)[0], 2)

    def test_complete_reports_both_routes(self):
        code, out, _ = run_cli("complete", "special_partial.json",
                               "e11_operator.json", "--route", "both")
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertTrue(report["completable"])
        self.assertTrue(report["feasibility"]["compressed_cp"])
        self.assertLess(report["route_discrepancy"], 1e-8)

    def test_aeq_on_counterexample_pair(self):
        code, out, _ = run_cli("aeq", "nqp_phi.json", "nqp_psi.json",
                               "--r", "nqp_r.json")
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertTrue(report["equivalent"])
        self.assertFalse(report["maps_equal"])
        self.assertEqual(report["rigidity"]["failed_hypothesis"],
                         "quasi-purity")

    def test_aeq_inequivalent_exit_1(self):
        code, out, _ = run_cli("aeq", "special_map.json", "identity_map.json",
                               "--r", "e11_operator.json")
        self.assertEqual(code, 1)
        self.assertFalse(json.loads(out)["equivalent"])

    def test_tolerance_flags_are_echoed(self):
        code, out, _ = run_cli("quasipure", "eb_map.json",
                               "--tol-eq", "1e-8", "--tol-rank", "1e-8",
                               "--tol-psd", "1e-9")
        self.assertEqual(code, 0)
        tols = json.loads(out)["tolerances"]
        self.assertEqual(tols["eps_eq"], 1e-8)
        self.assertEqual(tols["eps_rank"], 1e-8)
        self.assertEqual(tols["eps_psd"], 1e-9)

    def test_out_of_range_tolerance_exits_2(self):
        self.assertEqual(run_cli("quasipure", "eb_map.json",
                                 "--tol-eq", "0.5")[0], 2)


class ReportStabilityTests(unittest.TestCase):

    def test_reports_are_byte_identical_across_runs(self):
        first = run_cli("quasipure", "special_map.json", "--seed", "0")
        second = run_cli("quasipure", "special_map.json", "--seed", "0")
        self.assertEqual(first[1], second[1])
        first = run_cli("aeq", "nqp_phi.json", "nqp_psi.json",
                        "--r", "nqp_r.json", "--seed", "0")
        second = run_cli("aeq", "nqp_phi.json", "nqp_psi.json",
                         "--r", "nqp_r.json", "--seed", "0")
        self.assertEqual(first[1], second[1])

    def test_golden_reports(self):
        for args, golden in [
            (("quasipure", "eb_map.json", "--seed", "0"),
             "golden_quasipure_eb.json"),
            (("quasipure", "special_map.json", "--seed", "0"),
             "golden_quasipure_special.json"),
            (("aeq", "nqp_phi.json", "nqp_psi.json", "--r", "nqp_r.json",
              "--seed", "0"),
             "golden_aeq_nonquasipure.json"),
        ]:
            _, out, _ = run_cli(*args)
            expected = (DATA / golden).read_text()
            self.assertEqual(out, expected, f"golden drift for {golden}")

    def test_wall_time_goes_to_stderr_not_stdout(self):
        _, out, err = run_cli("quasipure", "eb_map.json")
        self.assertNotIn("wall time", out)
        self.assertIn("wall time", err)


class DemoTests(unittest.TestCase):

    def test_demo_list(self):
        code, out, _ = run_cli("demo", "--list")
        self.assertEqual(code, 0)
        names = json.loads(out)["demos"]
        self.assertIn("eb-map-is-quasipure", names)
        self.assertIn("flip-twirl-forced-equality-at-e1", names)
        self.assertIn("diagonal-pair-counterexample", names)
        self.assertGreaterEqual(len(names), 7)

    def test_demo_runs_clean(self):
        code, out, _ = run_cli("demo", "--seed", "0")
        self.assertEqual(code, 0)
        report = json.loads(out)
        self.assertTrue(report["all_passed"])
        self.assertTrue(all(row["passed"] for row in report["results"]))


if __name__ == "__main__":
    unittest.main()
