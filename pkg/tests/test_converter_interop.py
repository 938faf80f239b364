"""Cross-language checks against the converter (skipped when it is not built).

The converter lives in converter/ as a separate node package; these tests
exercise the shared on-disk contracts: the TSAR archive and the
deterministic synthetic weight stream.
"""

import json
import os
import shutil
import subprocess

import numpy as np
import pytest

REPO = os.path.join(os.path.dirname(__file__), "..")
CONVERTER_CLI = os.path.join(REPO, "converter", "dist", "cli.js")

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not os.path.isfile(CONVERTER_CLI),
    reason="converter not built (run `npm run build` in converter/)",
)


def run_cli(*args):
    return subprocess.run(["node", CONVERTER_CLI, *args], capture_output=True, text=True)


class TestTsarInterop:
    def test_node_written_archive_reads_bitwise(self, tmp_path):
        script = """
const { writeTsar } = require(process.argv[1]);
const data = new Float32Array(64);
for (let i = 0; i < 64; i++) data[i] = Math.fround(i * 0.015625 - 0.3);
data[0] = -0; data[1] = 1e-40; data[2] = 3.4028235e38;
writeTsar(process.argv[2], [
  { name: 'probe', shape: [8, 8], data },
  { name: 'tiny', shape: [2], data: Float32Array.from([0.1, -0.2]) },
]);
"""
        out = tmp_path / "interop.tsar"
        r = subprocess.run(
            ["node", "-e", script, os.path.join(REPO, "converter", "dist", "tsar.js"), str(out)],
            capture_output=True,
            text=True,
        )
        assert r.returncode == 0, r.stderr
        from deepfeat import tsar

        back = tsar.read(str(out))
        expect = (np.arange(64, dtype=np.float64) * 0.015625 - 0.3).astype(np.float32)
        expect[0], expect[1], expect[2] = -0.0, 1e-40, 3.4028235e38
        np.testing.assert_array_equal(back["probe"].ravel(), expect)
        assert back["probe"].shape == (8, 8)
        np.testing.assert_array_equal(back["tiny"], np.array([0.1, -0.2], dtype=np.float32))


class TestFullConvertCycle:
    def test_synthetic_checkpoint_converts_and_loads_bitwise(self, tmp_path):
        ckpt = tmp_path / "ckpt"
        r = run_cli(
            "synth-checkpoint",
            "--seed",
            "2026",
            "--out",
            str(ckpt),
            "--vocab-dir",
            os.path.join(REPO, "fixtures", "gpt2"),
        )
        assert r.returncode == 0, r.stderr
        out = tmp_path / "model.tsar"
        r = run_cli("convert", "--checkpoint", str(ckpt), "--out", str(out))
        assert r.returncode == 0, r.stderr
        assert (tmp_path / "vocab.json").is_file() and (tmp_path / "merges.txt").is_file()

        from deepfeat import tsar
        from deepfeat.llm import Gpt2Weights, tensor_schema
        from deepfeat.llm.synthetic import synthetic_tensors

        tensors = tsar.read(str(out))
        reference = synthetic_tensors(2026)
        schema = tensor_schema()
        assert list(tensors.keys()) == [name for name, _ in schema]
        for name, shape in schema:
            assert tensors[name].shape == shape
            np.testing.assert_array_equal(tensors[name], reference[name], err_msg=name)

        weights = Gpt2Weights.from_tsar(str(out))
        assert weights["wte"].shape == (50257, 768)

        for p in (ckpt / "model.safetensors", out):
            os.unlink(p)

    def test_fixture_emission_matches_committed(self, tmp_path):
        r = run_cli(
            "fixtures",
            "--vocab-dir",
            os.path.join(REPO, "fixtures", "gpt2"),
            "--strings",
            os.path.join(REPO, "fixtures", "tokenizer_fixtures.json"),
            "--cases",
            os.path.join(REPO, "fixtures", "forward", "meta.json"),
            "--out",
            str(tmp_path),
        )
        assert r.returncode == 0, r.stderr
        committed = os.path.join(REPO, "fixtures")
        assert (tmp_path / "tokenizer_fixtures.json").read_bytes() == open(
            os.path.join(committed, "tokenizer_fixtures.json"), "rb"
        ).read()
        meta = json.load(open(os.path.join(committed, "forward", "meta.json")))
        assert (tmp_path / "forward" / "meta.json").read_bytes() == open(
            os.path.join(committed, "forward", "meta.json"), "rb"
        ).read()
        for case in meta["cases"]:
            name = f"{case['name']}.hidden.bin"
            assert (tmp_path / "forward" / name).read_bytes() == open(
                os.path.join(committed, "forward", name), "rb"
            ).read()
