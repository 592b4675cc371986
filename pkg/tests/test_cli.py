import json
import subprocess
import sys

import numpy as np
import pytest

from sparsteg import cli
from sparsteg.config import load_key
from sparsteg.image_io import load_float_raster, load_image, save_image
from sparsteg.metrics import nae
from sparsteg.suite import cover_image, secret_image


@pytest.fixture
def files(tmp_path):
    save_image(cover_image("camera", 128), tmp_path / "cover.pgm")
    save_image(secret_image("coffee", 64), tmp_path / "coffee.png")
    save_image(secret_image("astronaut", 64), tmp_path / "astro.pgm")
    assert cli.main(["keygen", "--out", str(tmp_path / "key.json"), "--seed", "9", "--r", "128", "--m", "64"]) == 0
    return tmp_path


def test_keygen_defaults(tmp_path):
    assert cli.main(["keygen", "--out", str(tmp_path / "k.json")]) == 0
    key = load_key(tmp_path / "k.json")
    assert key.r == 1024 and key.p3 == 1600 and 0 <= key.seed < 2**64


def test_embed_extract(files, capsys):
    t = files
    rc = cli.main(["embed", "--cover", str(t / "cover.pgm"), "--secret", f"{t / 'coffee.png'}@3",
                   "--key", str(t / "key.json"), "--out", str(t / "stego.pgm")])
    assert rc == 0
    line = capsys.readouterr().out.strip()
    fields = line.split(",")
    assert fields[:2] == ["bpp", "2.000"] and fields[2] == "psnr" and float(fields[3]) > 30
    rc = cli.main(["extract", "--stego", str(t / "stego.pgm"), "--key", str(t / "key.json"),
                   "--slots", "3", "--out-dir", str(t / "out")])
    assert rc == 0
    got = load_image(t / "out" / "secret3.pgm")
    assert nae(secret_image("coffee", 64), got) < 0.2


def test_float_stego(files, capsys):
    t = files
    rc = cli.main(["embed", "--cover", str(t / "cover.pgm"), "--secret", str(t / "astro.pgm"),
                   "--secret", str(t / "coffee.png"), "--key", str(t / "key.json"),
                   "--out", str(t / "stego.sabf"), "--float-stego"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("bpp,4.000,")
    assert load_float_raster(t / "stego.sabf").dtype == np.float64
    assert cli.main(["extract", "--stego", str(t / "stego.sabf"), "--key", str(t / "key.json"),
                     "--slots", "1,2", "--out-dir", str(t / "o"), "--format", "png"]) == 0
    assert (t / "o" / "secret1.png").exists() and (t / "o" / "secret2.png").exists()


def test_resize_on_ingest(files, capsys):
    t = files
    save_image(cover_image("moon", 100), t / "odd.pgm")
    rc = cli.main(["embed", "--cover", str(t / "odd.pgm"), "--secret", str(t / "astro.pgm"),
                   "--key", str(t / "key.json"), "--out", str(t / "s.png")])
    assert rc == 0
    assert "resizing cover" in capsys.readouterr().err
    assert load_image(t / "s.png").shape == (128, 128)


def test_too_many_secrets(files):
    t = files
    args = ["embed", "--cover", str(t / "cover.pgm"), "--key", str(t / "key.json"), "--out", str(t / "x.pgm")]
    for _ in range(5):
        args += ["--secret", str(t / "astro.pgm")]
    with pytest.raises(SystemExit) as info:
        cli.main(args)
    assert info.value.code == 2


def test_validation_error_lists_violations(files, capsys):
    t = files
    doc = json.loads((t / "key.json").read_text())
    doc.update(p3=32, l=7)
    (t / "bad.json").write_text(json.dumps(doc))
    rc = cli.main(["embed", "--cover", str(t / "cover.pgm"), "--secret", str(t / "astro.pgm"),
                   "--key", str(t / "bad.json"), "--out", str(t / "x.pgm")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "p3 > p2" in err and "l=7 must divide m" in err


def test_missing_file(files, capsys):
    t = files
    rc = cli.main(["metrics", "--a", str(t / "cover.pgm"), "--b", str(t / "none.pgm")])
    assert rc == 1 and "error" in capsys.readouterr().err


@pytest.mark.parametrize("slots", ["", "0", "1,1", "5", "a"])
def test_bad_slots(files, slots):
    t = files
    with pytest.raises(SystemExit) as info:
        cli.main(["extract", "--stego", str(t / "cover.pgm"), "--key", str(t / "key.json"),
                  "--slots", slots, "--out-dir", str(t)])
    assert info.value.code == 2


def test_missing_slots_flag(files):
    t = files
    with pytest.raises(SystemExit) as info:
        cli.main(["extract", "--stego", str(t / "cover.pgm"), "--key", str(t / "key.json"), "--out-dir", str(t)])
    assert info.value.code == 2


def test_metrics(files, capsys):
    t = files
    assert cli.main(["metrics", "--a", str(t / "cover.pgm"), "--b", str(t / "cover.pgm")]) == 0
    header, values = capsys.readouterr().out.strip().splitlines()
    assert header == "psnr,mssim,ncc,entropy_a,entropy_b,nae"
    v = values.split(",")
    assert v[0] == "inf" and v[1] == "1.000000" and v[5] == "0.000000"


def test_metrics_size_mismatch(files, capsys):
    t = files
    assert cli.main(["metrics", "--a", str(t / "cover.pgm"), "--b", str(t / "astro.pgm")]) == 1


def test_assign_slots():
    assert cli.assign_slots([("a", None), ("b", 1), ("c", None)]) == {1: "b", 2: "a", 3: "c"}
    assert cli.parse_secret("dir/x@y.png") == ("dir/x@y.png", None)
    assert cli.parse_secret("x.png@4") == ("x.png", 4)
    with pytest.raises(cli.UsageError):
        cli.assign_slots([("a", 2), ("b", 2)])


def test_suite_and_experiment(tmp_path, capsys):
    assert cli.main(["suite", "--out-dir", str(tmp_path / "s"), "--r", "64", "--m", "32"]) == 0
    assert cli.main(["keygen", "--out", str(tmp_path / "k.json"), "--seed", "1", "--r", "64", "--m", "32"]) == 0
    assert cli.main(["experiment", "--manifest", str(tmp_path / "s" / "manifest.json"), "--key",
                     str(tmp_path / "k.json"), "--out-dir", str(tmp_path / "o"), "--no-data"]) == 0
    text = (tmp_path / "o" / "results.csv").read_text()
    assert len(text.splitlines()) == 12
    assert not (tmp_path / "o" / "data").exists()


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "sparsteg.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for sub in ("embed", "extract", "metrics", "experiment", "keygen"):
        assert sub in out.stdout
