"""Tests for the package logging setup."""

import logging

import pytest

from omega_width.logging_config import configure_logging, get_logger, logger


@pytest.fixture(autouse=True)
def restore_quiet_default():
    yield
    configure_logging("WARNING")


class TestConfigureLogging:
    """Test handler installation and levels."""

    def test_replaces_handlers(self):
        configure_logging("INFO")
        configure_logging("DEBUG")
        assert len(logger.handlers) == 1
        assert logger.level == logging.DEBUG

    def test_log_file(self, tmp_path):
        path = tmp_path / "logs" / "run.log"
        configure_logging("INFO", log_file=path)
        get_logger("engine.search").info("written to file")
        for handler in logger.handlers:
            handler.flush()
        assert "written to file" in path.read_text(encoding="utf-8")

    def test_quiet_modules(self):
        configure_logging("DEBUG", quiet_modules=["engine.search"])
        assert not get_logger("engine.search").isEnabledFor(logging.DEBUG)
        assert get_logger("engine.minimality").isEnabledFor(logging.DEBUG)

    def test_quiet_modules_reset(self):
        configure_logging("DEBUG", quiet_modules=["engine.search"])
        configure_logging("DEBUG")
        assert get_logger("engine.search").isEnabledFor(logging.DEBUG)


class TestGetLogger:
    """Test logger naming."""

    def test_module_name_kept(self):
        assert get_logger("omega_width.atlas.core").name == "omega_width.atlas.core"

    def test_bare_name_prefixed(self):
        assert get_logger("repro").name == "omega_width.repro"
