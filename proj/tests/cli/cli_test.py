"""End-to-end checks of the bbmr command line tool."""

import json
import os
import shutil
import struct
import subprocess
import sys
import unittest

import jsonschema

BBMR = os.environ["BBMR_EXE"]
WORK = os.environ["BBMR_WORK"]
SCHEMA = os.environ["BBMR_SCHEMA"]

EXIT_OK, EXIT_INTERNAL, EXIT_IO, EXIT_CONFIG = 0, 1, 2, 3
EXIT_MAGIC, EXIT_VERSION, EXIT_TRUNCATED, EXIT_CRC, EXIT_INVARIANT, EXIT_NO_INPUT = 4, 5, 6, 7, 8, 9


def run(*args, env=None):
    full_env = dict(os.environ, **(env or {}))
    return subprocess.run([BBMR, *map(str, args)], capture_output=True, text=True, env=full_env)


def png_size(path):
    with open(path, "rb") as f:
        head = f.read(24)
    assert head[:8] == b"\x89PNG\r\n\x1a\n"
    return struct.unpack(">II", head[16:24])


def strip_timings(report):
    report = dict(report)
    report.pop("timings")
    return json.dumps(report, sort_keys=True)


class Cli(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        shutil.rmtree(WORK, ignore_errors=True)
        os.makedirs(WORK)
        cls.corpus = os.path.join(WORK, "corpus")
        os.makedirs(cls.corpus)
        for kind, count, size in (("heterogeneous", 2, 512), ("noise", 1, 200)):
            r = run("synth", cls.corpus, "--kind", kind, "--count", count, "--size", size)
            assert r.returncode == 0, r.stderr
        cls.het = os.path.join(cls.corpus, "heterogeneous_000.png")
        cls.noise = os.path.join(cls.corpus, "noise_000.png")
        with open(SCHEMA) as f:
            cls.schema = json.load(f)

    def path(self, name):
        return os.path.join(WORK, name)

    def downscale(self, src, name, *flags):
        out = self.path(name)
        r = run("downscale", src, "-o", out, *flags)
        self.assertEqual(r.returncode, EXIT_OK, r.stderr)
        return out

    def test_downscale_upscale_preserves_dimensions(self):
        odd = os.path.join(WORK, "odd")
        os.makedirs(odd, exist_ok=True)
        self.assertEqual(run("synth", odd, "--kind", "gradient", "--size", 300).returncode, EXIT_OK)
        for src in (self.het, os.path.join(odd, "gradient_000.png")):
            c = self.downscale(src, "dims.bbmr")
            self.assertTrue(os.path.exists(c + ".plan.json"))
            out = self.path("dims.png")
            r = run("upscale", c, "-o", out)
            self.assertEqual(r.returncode, EXIT_OK, r.stderr)
            self.assertEqual(png_size(out), png_size(src))

    def test_small_image_and_flat_input(self):
        small = os.path.join(WORK, "small")
        os.makedirs(small, exist_ok=True)
        for kind in ("heterogeneous", "flat"):
            self.assertEqual(run("synth", small, "--kind", kind, "--size", 256).returncode, EXIT_OK)
        c = self.downscale(os.path.join(small, "heterogeneous_000.png"), "small.bbmr")
        self.assertEqual(json.loads(run("inspect", c, "--json").stdout)["n_blocks"], 4)

        flat = self.downscale(os.path.join(small, "flat_000.png"), "flat.bbmr", "--t", "0.5")
        info = json.loads(run("inspect", flat, "--json").stdout)
        self.assertEqual(info["histogram"], {"k1": 0, "k2": 4, "k3": 0})
        uniform = self.downscale(os.path.join(small, "flat_000.png"), "flat_u.bbmr", "--t", "inf")
        self.assertEqual(os.path.getsize(flat), os.path.getsize(uniform))

    def test_plan_sidecar(self):
        c = self.downscale(self.het, "plan.bbmr")
        with open(c + ".plan.json") as f:
            plan = json.load(f)
        self.assertEqual(len(plan["blocks"]), 16)
        self.assertTrue(all(b["scale"] in (1, 2, 3) for b in plan["blocks"]))

    def test_inspect_histogram(self):
        c = self.downscale(self.het, "inspect.bbmr")
        r = run("inspect", c, "--json")
        self.assertEqual(r.returncode, EXIT_OK, r.stderr)
        info = json.loads(r.stdout)
        self.assertEqual(sum(info["histogram"].values()), info["n_blocks"])
        self.assertEqual(info["crc"], "OK")

        u = self.downscale(self.het, "uniform.bbmr", "--t", "inf")
        info = json.loads(run("inspect", u, "--json").stdout)
        self.assertEqual(info["histogram"], {"k1": 0, "k2": info["n_blocks"], "k3": 0})

    def test_budget_neutral_containers(self):
        a = self.downscale(self.het, "bbmr.bbmr")
        u = self.downscale(self.het, "flat_rate.bbmr", "--t", "inf")
        self.assertEqual(os.path.getsize(a), os.path.getsize(u))

    def test_tampered_container(self):
        c = self.downscale(self.het, "tamper.bbmr")
        with open(c, "rb") as f:
            data = bytearray(f.read())
        data[len(data) // 2] ^= 0xFF
        bad = self.path("tampered.bbmr")
        with open(bad, "wb") as f:
            f.write(data)
        r = run("inspect", bad)
        self.assertEqual(r.returncode, EXIT_CRC)
        self.assertIn("FAIL", r.stdout)
        self.assertEqual(run("upscale", bad, "-o", self.path("x.png")).returncode, EXIT_CRC)

    def test_decode_error_exit_codes(self):
        c = self.downscale(self.het, "errors.bbmr")
        with open(c, "rb") as f:
            good = f.read()

        def variant(name, data):
            p = self.path(name)
            with open(p, "wb") as f:
                f.write(data)
            return run("upscale", p, "-o", self.path("err.png")).returncode

        self.assertEqual(variant("magic.bbmr", b"XXXX" + good[4:]), EXIT_MAGIC)
        self.assertEqual(variant("version.bbmr", good[:4] + b"\x07" + good[5:]), EXIT_VERSION)
        self.assertEqual(variant("short.bbmr", good[:10]), EXIT_TRUNCATED)
        self.assertEqual(variant("cut.bbmr", good[:-100]), EXIT_TRUNCATED)
        self.assertEqual(variant("trailing.bbmr", good + b"\x00"), EXIT_INVARIANT)
        self.assertEqual(variant("blocks.bbmr", good[:22] + b"\x05\x00\x00\x00" + good[26:]), EXIT_INVARIANT)

    def test_other_exit_codes(self):
        self.assertEqual(run("downscale", self.path("missing.png"), "-o", self.path("m.bbmr")).returncode, EXIT_IO)
        self.assertEqual(run("downscale", self.het, "-o", self.path("k.bbmr"), "--kernel", "gauss").returncode,
                         EXIT_CONFIG)
        self.assertEqual(run("downscale", self.het, "-o", self.path("k.bbmr"), "--factors", "4,4,8").returncode,
                         EXIT_CONFIG)
        self.assertEqual(run("downscale", self.het, "--no-such-flag").returncode, EXIT_CONFIG)
        empty = self.path("empty")
        os.makedirs(empty, exist_ok=True)
        self.assertEqual(run("bench", empty).returncode, EXIT_NO_INPUT)

    def test_roundtrip_record(self):
        r = run("roundtrip", self.het)
        self.assertEqual(r.returncode, EXIT_OK, r.stderr)
        rec = json.loads(r.stdout)
        jsonschema.validate(rec, {"$defs": self.schema["$defs"], "$ref": "#/$defs/record"})
        self.assertGreater(rec["gain_db"], 0.0)

        noise = json.loads(run("roundtrip", self.noise).stdout)
        self.assertEqual(noise["trades"], 0)
        self.assertAlmostEqual(noise["gain_db"], 0.0, delta=0.05)

    def test_no_deblock_keeps_more_seams(self):
        on = json.loads(run("roundtrip", self.het).stdout)
        off = json.loads(run("roundtrip", self.het, "--no-deblock").stdout)
        self.assertGreaterEqual(off["seam_index_after"], on["seam_index_after"])

    def test_bench_report(self):
        report_path = self.path("report.json")
        csv_path = self.path("report.csv")
        r = run("bench", self.corpus, "--report", report_path, "--csv", csv_path, "--compare-proxy")
        self.assertEqual(r.returncode, EXIT_OK, r.stderr)
        with open(report_path) as f:
            report = json.load(f)
        jsonschema.validate(report, self.schema)
        self.assertEqual(len(report["images"]), 3)
        self.assertEqual(report["aggregate"]["images"], 3)
        self.assertIn("mean_plan_agreement", report["aggregate"])
        for rec in report["images"]:
            self.assertEqual(rec["payload_bytes"], rec["uniform_payload_bytes"])
            self.assertIn("proxy", rec)
        with open(csv_path) as f:
            lines = f.read().splitlines()
        self.assertEqual(len(lines), 4)

    def test_bench_is_deterministic(self):
        outputs = []
        for threads in ("1", "4"):
            p = self.path(f"det_{threads}.json")
            r = run("bench", self.corpus, "--report", p, env={"BBMR_THREADS": threads})
            self.assertEqual(r.returncode, EXIT_OK, r.stderr)
            with open(p) as f:
                outputs.append(strip_timings(json.load(f)))
        self.assertEqual(outputs[0], outputs[1])

    def test_bench_skips_unreadable_files(self):
        mixed = self.path("mixed")
        shutil.rmtree(mixed, ignore_errors=True)
        os.makedirs(mixed)
        shutil.copy(self.noise, mixed)
        with open(os.path.join(mixed, "broken.png"), "wb") as f:
            f.write(b"not a png")
        p = self.path("mixed.json")
        r = run("bench", mixed, "--report", p)
        self.assertEqual(r.returncode, EXIT_OK, r.stderr)
        with open(p) as f:
            self.assertEqual(len(json.load(f)["images"]), 1)

        only_broken = self.path("broken_only")
        shutil.rmtree(only_broken, ignore_errors=True)
        os.makedirs(only_broken)
        shutil.copy(os.path.join(mixed, "broken.png"), only_broken)
        self.assertEqual(run("bench", only_broken).returncode, EXIT_NO_INPUT)


if __name__ == "__main__":
    unittest.main(argv=sys.argv[:1], verbosity=2)
