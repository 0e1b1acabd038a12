import json

import pytest
from pydantic import ValidationError

from dna_image_store.config import ChannelParams, ExperimentConfig, RestorationParams
from dna_image_store.exceptions import ManifestError
from dna_image_store.manifest import MANIFEST_VERSION, PoolManifest, StreamEntry
from dna_image_store.utils.codec_settings import CodecSettings


@pytest.fixture(scope="module")
def manifest(codec, ramp_image, odd_images) -> PoolManifest:
    return codec.encode_images([ramp_image, odd_images["odd"]], names=["ramp", "odd"]).manifest


def test_manifest_file_round_trip(tmp_path, manifest, primer_set):
    path = tmp_path / "manifest.json"
    manifest.to_file(path)
    loaded = PoolManifest.from_file(path)
    assert loaded == manifest
    assert loaded.format_version == MANIFEST_VERSION
    # Primers and Huffman tables survive the JSON file
    assert loaded.primer_set().to_pairs() == primer_set.to_pairs()
    assert loaded.image(0).huffman_table().codes == manifest.image(0).huffman_table().codes
    assert [image.name for image in loaded.images] == ["ramp", "odd"]


def test_manifest_lookups(manifest):
    keys = manifest.stream_keys()
    # Every stream key belongs to a listed image
    assert {k[0] for k in keys} == {0, 1}
    addresses = manifest.expected_addresses()
    # One distinct address per oligo
    assert len(addresses) == manifest.oligo_count
    image, color, level = keys[0]
    assert manifest.image(image).stream(color, level).level == level
    with pytest.raises(ManifestError):
        manifest.image(5)
    with pytest.raises(ManifestError):
        manifest.image(0).stream("B", 9)


def test_manifest_invalid_files(tmp_path, manifest):
    data = json.loads(manifest.model_dump_json())

    future = dict(data, format_version=MANIFEST_VERSION + 1)
    path = tmp_path / "future.json"
    path.write_text(json.dumps(future))
    # Unknown versions are rejected before decoding
    with pytest.raises(ManifestError):
        PoolManifest.from_file(path)

    wrong_count = dict(data, oligo_count=data["oligo_count"] + 1)
    path = tmp_path / "count.json"
    path.write_text(json.dumps(wrong_count))
    with pytest.raises(ManifestError):
        PoolManifest.from_file(path)

    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    with pytest.raises(ManifestError):
        PoolManifest.from_file(garbage)
    with pytest.raises(ManifestError):
        PoolManifest.from_file(tmp_path / "missing.json")


def test_stream_entry_block_count():
    # 242 payload bits per block
    assert StreamEntry(color="R", level=0, symbol_count=3, bit_length=242, block_count=1)
    assert StreamEntry(color="G", level=7, symbol_count=90, bit_length=243, block_count=2)
    with pytest.raises(ValidationError):
        StreamEntry(color="B", level=1, symbol_count=3, bit_length=243, block_count=1)
    with pytest.raises(ValidationError):
        StreamEntry(color="X", level=1, symbol_count=3, bit_length=10, block_count=1)


def test_channel_params():
    params = ChannelParams(drop_rate=0.1)
    # Rates apply when no count is given
    assert params.drops_for(95) == 10
    assert ChannelParams(drop_count=3, drop_rate=0.5).drops_for(100) == 3
    assert not params.simulates_reads
    assert ChannelParams(fixed_reads=5).simulates_reads
    with pytest.raises(ValidationError):
        ChannelParams(coverage=0.5)
    with pytest.raises(ValidationError):
        ChannelParams(level=8)


def test_restoration_params():
    params = RestorationParams()
    assert (params.t, params.window, params.max_median_window) == (18, 9, 7)
    assert params.sigma_d2 == params.sigma_r2 == 45.0
    # Window sides must be odd
    with pytest.raises(ValidationError):
        RestorationParams(window=8)
    with pytest.raises(ValidationError):
        RestorationParams(max_median_window=6)
    with pytest.raises(ValidationError):
        RestorationParams(sigma_r2=0)


def test_experiment_config_paths(tmp_path):
    config_dir = tmp_path / "configs"
    config_dir.mkdir()
    path = config_dir / "run.json"
    path.write_text(
        json.dumps(
            {
                "inputs": ["images/a.ppm", str(tmp_path / "b.ppm")],
                "output_dir": "out",
                "seed": 4,
                "channel": {"drop_count": 10},
            }
        )
    )
    config = ExperimentConfig.from_file(path)
    # Relative paths resolve against the config directory
    assert config.inputs == [config_dir / "images" / "a.ppm", tmp_path / "b.ppm"]
    assert config.output_dir == config_dir / "out"
    assert config.channel.drop_count == 10
    assert config.restoration == RestorationParams()

    copy = tmp_path / "copy.json"
    config.to_file(copy)
    assert ExperimentConfig.from_file(copy) == config


def test_experiment_config_invalid(tmp_path):
    too_many = tmp_path / "many.json"
    too_many.write_text(json.dumps({"inputs": [f"{i}.ppm" for i in range(17)], "output_dir": "o"}))
    with pytest.raises(ManifestError):
        ExperimentConfig.from_file(too_many)

    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"inputs": [], "output_dir": "o"}))
    with pytest.raises(ManifestError):
        ExperimentConfig.from_file(empty)

    with pytest.raises(ManifestError):
        ExperimentConfig.from_file(tmp_path / "missing.json")


def test_codec_settings_from_env(monkeypatch):
    for name in ("RESYNC_RATE", "PRIMER_SEED", "PRIMER_ATTEMPTS", "PROBE_BUDGET", "LOG_LEVEL"):
        monkeypatch.delenv(f"DNA_IMAGE_STORE_{name}", raising=False)
    # Unset variables keep the defaults
    assert CodecSettings.from_env() == CodecSettings()

    monkeypatch.setenv("DNA_IMAGE_STORE_RESYNC_RATE", "0.1")
    monkeypatch.setenv("DNA_IMAGE_STORE_PRIMER_SEED", "7")
    monkeypatch.setenv("DNA_IMAGE_STORE_LOG_LEVEL", "debug")
    settings = CodecSettings.from_env()
    assert settings.resync_rate == 0.1
    assert settings.primer_seed == 7
    assert settings.log_level == "DEBUG"
    assert settings.probe_budget == CodecSettings().probe_budget

    monkeypatch.setenv("DNA_IMAGE_STORE_RESYNC_RATE", "1.5")
    with pytest.raises(ValueError):
        CodecSettings.from_env()
    monkeypatch.setenv("DNA_IMAGE_STORE_RESYNC_RATE", "fast")
    with pytest.raises(ValueError):
        CodecSettings.from_env()


def test_codec_settings_validation():
    with pytest.raises(ValueError):
        CodecSettings(resync_rate=0)
    with pytest.raises(ValueError):
        CodecSettings(probe_budget=0)
    with pytest.raises(ValueError):
        CodecSettings(primer_attempts=0)
