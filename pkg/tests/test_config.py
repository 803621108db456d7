import pytest

from museit.config import Settings, load_settings
from museit.errors import ParseError


def write_conf(tmp_path, text):
    path = tmp_path / "museit.conf"
    path.write_text(text, encoding="utf-8")
    return path


class TestDefaults:
    def test_none_gives_defaults(self):
        settings = load_settings(None)
        assert settings == Settings()
        assert settings.timeout_s == 300
        assert settings.permits_per_minute == 60
        assert settings.output_dir == "./Muse-it"
        assert settings.annotator_backend == "lexicon"
        assert settings.reddit_sort == "relevance"
        assert settings.min_topic_size == 5
        assert settings.accept_truncated is False
        assert settings.burst is None

    def test_missing_file_gives_defaults(self, tmp_path):
        assert load_settings(tmp_path / "nope.conf") == Settings()


class TestParsing:
    def test_full_file(self, tmp_path):
        path = write_conf(
            tmp_path,
            """
            # sample config
            timeout_s = 120
            rate.permits_per_minute = 30
            rate.burst = 5

            output_dir = /data/out
            annotator.backend = lexicon
            cache.accept_truncated = yes
            reddit.sort = new
            min_topic_size = 3
            """,
        )
        settings = load_settings(path)
        assert settings.timeout_s == 120
        assert settings.permits_per_minute == 30
        assert settings.burst == 5
        assert settings.output_dir == "/data/out"
        assert settings.accept_truncated is True
        assert settings.reddit_sort == "new"
        assert settings.min_topic_size == 3

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = write_conf(tmp_path, "# just a comment\n\n   \n")
        assert load_settings(path) == Settings()

    def test_spaces_around_equals_optional(self, tmp_path):
        path = write_conf(tmp_path, "timeout_s=42")
        assert load_settings(path).timeout_s == 42

    @pytest.mark.parametrize("raw,expected", [
        ("true", True), ("TRUE", True), ("on", True), ("1", True),
        ("false", False), ("no", False), ("off", False), ("0", False),
    ])
    def test_bool_spellings(self, tmp_path, raw, expected):
        path = write_conf(tmp_path, f"cache.accept_truncated = {raw}")
        assert load_settings(path).accept_truncated is expected


class TestRejection:
    def test_unknown_key(self, tmp_path):
        path = write_conf(tmp_path, "timeot_s = 300")
        with pytest.raises(ParseError) as err:
            load_settings(path)
        assert "timeot_s" in str(err.value)
        assert err.value.line == 1

    def test_bad_integer(self, tmp_path):
        path = write_conf(tmp_path, "# header\ntimeout_s = soon")
        with pytest.raises(ParseError) as err:
            load_settings(path)
        assert err.value.line == 2

    def test_bad_boolean(self, tmp_path):
        path = write_conf(tmp_path, "cache.accept_truncated = maybe")
        with pytest.raises(ParseError):
            load_settings(path)

    def test_line_without_equals(self, tmp_path):
        path = write_conf(tmp_path, "timeout_s 300")
        with pytest.raises(ParseError) as err:
            load_settings(path)
        assert err.value.line == 1
