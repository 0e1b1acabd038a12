import json

import numpy as np
import pytest

from dna_image_store import RgbImage
from dna_image_store.cli import EXIT_DATA, EXIT_USAGE, main
from dna_image_store.dna.fasta import read_fasta
from dna_image_store.pixel_pipeline import dequantize_image, quantize_image
from dna_image_store.utils.image_io import read_image, write_ppm


@pytest.fixture
def inputs(tmp_path, ramp_image, make_natural_image):
    ramp = tmp_path / "ramp.ppm"
    scene = tmp_path / "scene.ppm"
    write_ppm(ramp, ramp_image)
    write_ppm(scene, make_natural_image(24, 30, seed=5))
    return [ramp, scene]


def _encode(tmp_path, inputs, out="encoded"):
    argv = ["encode", "--out", str(tmp_path / out)]
    for path in inputs:
        argv += ["--in", str(path)]
    return main(argv)


def test_cli_encode_decode(tmp_path, inputs, capsys):
    assert _encode(tmp_path, inputs) == 0
    out = tmp_path / "encoded"
    for name in ("pool.fasta", "pool.txt", "manifest.json", "encode_report.json"):
        assert (out / name).exists()
    # The summary reports the oligo count
    assert "oligos" in capsys.readouterr().out
    pool = read_fasta(out / "pool.fasta")
    assert len((out / "pool.txt").read_text().split()) == len(pool)

    # One-sequence-per-line pools decode like FASTA pools
    for pool_name, decoded_dir in (("pool.fasta", "fasta"), ("pool.txt", "lines")):
        code = main(
            [
                "decode",
                "--pool",
                str(out / pool_name),
                "--manifest",
                str(out / "manifest.json"),
                "--out",
                str(tmp_path / decoded_dir),
            ]
        )
        assert code == 0
    for path in inputs:
        expected = dequantize_image(quantize_image(read_image(path)))
        for decoded_dir in ("fasta", "lines"):
            # A clean pool decodes to the quantized inputs with empty masks
            assert read_image(tmp_path / decoded_dir / f"{path.stem}.decoded.ppm") == expected
            mask = read_image(tmp_path / decoded_dir / f"{path.stem}.mask.ppm")
            assert not mask.pixels.any()
    report = json.loads((tmp_path / "fasta" / "decode_report.json").read_text())
    assert report["gaps"] == 0


def test_cli_encode_is_deterministic(tmp_path, inputs):
    assert _encode(tmp_path, inputs, "first") == 0
    assert _encode(tmp_path, inputs, "second") == 0
    # Same inputs and settings give a byte-identical pool
    assert (tmp_path / "first" / "pool.fasta").read_bytes() == (
        tmp_path / "second" / "pool.fasta"
    ).read_bytes()


def test_cli_damaged_pipeline(tmp_path, inputs, capsys):
    assert _encode(tmp_path, inputs) == 0
    encoded = tmp_path / "encoded"
    channel = tmp_path / "channel"
    code = main(
        [
            "simulate",
            "--pool",
            str(encoded / "pool.fasta"),
            "--out",
            str(channel),
            "--drop",
            "3",
            "--fixed-reads",
            "5",
            "--read-err",
            "0.01",
            "--seed",
            "8",
        ]
    )
    assert code == 0
    for name in ("damaged.fasta", "reads.fasta", "received.fasta", "damage.json", "channel.json"):
        assert (channel / name).exists()
    damage = json.loads((channel / "damage.json").read_text())
    assert len(damage["dropped"]) == 3
    # Five reads for every surviving oligo
    assert len(read_fasta(channel / "reads.fasta")) == 5 * (len(read_fasta(encoded / "pool.fasta")) - 3)

    decoded = tmp_path / "decoded"
    code = main(
        [
            "decode",
            "--pool",
            str(channel / "received.fasta"),
            "--manifest",
            str(encoded / "manifest.json"),
            "--out",
            str(decoded),
        ]
    )
    assert code == 0

    restored = tmp_path / "restored" / "scene.restored.ppm"
    code = main(
        [
            "restore",
            "--decoded",
            str(decoded / "scene.decoded.ppm"),
            "--mask",
            str(decoded / "scene.mask.ppm"),
            "--out",
            str(restored),
            "--dump-stages",
        ]
    )
    assert code == 0
    assert read_image(restored).pixels.shape == (24, 30, 3)
    assert (restored.parent / "scene.inpainted.ppm").exists()

    metrics_path = tmp_path / "metrics.json"
    capsys.readouterr()
    code = main(
        [
            "eval",
            "--original",
            str(inputs[1]),
            "--corrupted",
            str(decoded / "scene.decoded.ppm"),
            "--restored",
            str(restored),
            "--damage",
            str(channel / "damage.json"),
            "--encoded",
            str(encoded / "pool.fasta"),
            "--received",
            str(channel / "received.fasta"),
            "--out",
            str(metrics_path),
        ]
    )
    assert code == 0
    assert "PSNR corrupted" in capsys.readouterr().out
    metrics = json.loads(metrics_path.read_text())
    assert metrics["dropped"] == 3
    assert metrics["oligos"]["missing"] == 3
    assert metrics["images"][0]["name"] == "scene"


def test_cli_run_experiment(tmp_path, inputs):
    config = tmp_path / "experiment.json"
    config.write_text(
        json.dumps(
            {
                "inputs": [p.name for p in inputs],
                "output_dir": "experiment",
                "seed": 3,
                "channel": {"drop_count": 2},
            }
        )
    )
    assert main(["run", "--config", str(config)]) == 0
    out = tmp_path / "experiment"
    for part in ("encode", "simulate", "decode", "restore"):
        assert (out / part).is_dir()
    assert (out / "restore" / "ramp.restored.ppm").exists()
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["oligos"]["missing"] == 2
    assert [m["name"] for m in metrics["images"]] == ["ramp", "scene"]
    assert json.loads((out / "config.json").read_text())["seed"] == 3


def test_cli_usage_errors(tmp_path, inputs):
    # Unknown commands and options are usage errors
    assert main(["transmogrify"]) == EXIT_USAGE
    assert main(["encode", "--out", str(tmp_path / "x")]) == EXIT_USAGE
    assert main(["encode", "--in", str(tmp_path / "missing.ppm"), "--out", str(tmp_path)]) == EXIT_USAGE

    decoded = tmp_path / "decoded.ppm"
    write_ppm(decoded, RgbImage(np.zeros((4, 4, 3), dtype=np.uint8)))
    # Even window sides are rejected
    code = main(["restore", "--decoded", str(decoded), "--out", str(tmp_path / "r.ppm"), "--window", "8"])
    assert code == EXIT_USAGE
    assert not (tmp_path / "r.ppm").exists()


def test_cli_data_errors(tmp_path, inputs, monkeypatch):
    assert _encode(tmp_path, inputs) == 0
    broken = tmp_path / "broken.json"
    broken.write_text("{}")
    code = main(
        [
            "decode",
            "--pool",
            str(tmp_path / "encoded" / "pool.fasta"),
            "--manifest",
            str(broken),
            "--out",
            str(tmp_path / "decoded"),
        ]
    )
    # An invalid manifest is a data error
    assert code == EXIT_DATA

    not_an_image = tmp_path / "text.ppm"
    not_an_image.write_text("hello")
    assert main(["encode", "--in", str(not_an_image), "--out", str(tmp_path / "o")]) == EXIT_DATA

    # Invalid environment settings are configuration errors
    monkeypatch.setenv("DNA_IMAGE_STORE_RESYNC_RATE", "2")
    assert _encode(tmp_path, inputs, "env") == EXIT_USAGE


def test_cli_config_and_pool_errors(tmp_path, inputs):
    assert _encode(tmp_path, inputs) == 0
    encoded = tmp_path / "encoded"

    # An invalid channel config is a configuration error
    config = tmp_path / "channel.json"
    config.write_text(json.dumps({"coverage": 0.5}))
    argv = ["simulate", "--pool", str(encoded / "pool.fasta"), "--out", str(tmp_path / "ch")]
    assert main(argv + ["--config", str(config)]) == EXIT_USAGE

    experiment = tmp_path / "experiment.json"
    experiment.write_text(json.dumps({"inputs": [], "output_dir": "o"}))
    assert main(["run", "--config", str(experiment)]) == EXIT_USAGE

    # A pool file that is not ASCII is a data error
    broken = tmp_path / "pool.fasta"
    broken.write_bytes((encoded / "pool.fasta").read_bytes() + b">x\nAC\xe9GT\n")
    code = main(
        [
            "decode",
            "--pool",
            str(broken),
            "--manifest",
            str(encoded / "manifest.json"),
            "--out",
            str(tmp_path / "decoded"),
        ]
    )
    assert code == EXIT_DATA
    assert main(["simulate", "--pool", str(broken), "--out", str(tmp_path / "ch2")]) == EXIT_DATA
