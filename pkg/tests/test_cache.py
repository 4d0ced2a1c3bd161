from tanglekit.cache import ResultCache


def test_roundtrip_and_corruption(tmp_path):
    cache = ResultCache(tmp_path)
    calls = []

    def compute():
        calls.append(1)
        return "13\n"

    assert cache.get_or_compute("count", 4, compute) == "13\n"
    assert cache.get_or_compute("count", 4, compute) == "13\n"
    assert len(calls) == 1

    path = cache.path("count", 4)
    header, body = path.read_text().split("\n", 1)
    assert header.startswith("tanglekit-cache v1 count 4 sha256=")
    path.write_text(header + "\n" + "14\n")  # payload no longer matches checksum
    assert cache.get_or_compute("count", 4, compute) == "13\n"
    assert len(calls) == 2

    path.write_text("garbage")
    assert cache.get_or_compute("count", 4, compute) == "13\n"
    path.write_bytes(b"\xff\xfe")
    assert cache.get_or_compute("count", 4, compute) == "13\n"
    assert len(calls) == 4


def test_passthrough():
    cache = ResultCache(None)
    assert cache.load("x", 1) is None
    assert cache.get_or_compute("x", 1, lambda: "y") == "y"


def test_env_default(tmp_path, monkeypatch):
    from tanglekit.cache import default_cache_dir
    monkeypatch.setenv("TANGLEKIT_CACHE", str(tmp_path))
    assert default_cache_dir() == tmp_path
    monkeypatch.delenv("TANGLEKIT_CACHE")
    assert default_cache_dir() is None
