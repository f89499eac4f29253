"""Tests for the error hierarchy, ErrorContext and event logging"""

import logging

import pytest

from error_handler import (
    ERROR_MESSAGES, BadParameter, DocumentError, ErrorContext, NDSError, NotInvertible, UnknownFixture,
    error_handler, error_summary, log_system_event
)


@pytest.fixture(autouse=True)
def clean_counters():
    error_handler.reset_error_statistics()
    yield
    error_handler.reset_error_statistics()


class TestHierarchy:
    """Exception types"""

    def test_value_errors(self):
        assert issubclass(BadParameter, ValueError)
        assert issubclass(DocumentError, ValueError)
        assert issubclass(UnknownFixture, KeyError)

    def test_document_error_keeps_path(self):
        error = DocumentError('/generators/1/name', "duplicate generator name 'g'")
        assert error.path == '/generators/1/name'
        assert str(error).startswith('/generators/1/name: ')

    def test_unknown_fixture_text(self):
        assert str(UnknownFixture('unknown fixture tent-map')) == 'unknown fixture tent-map'

    def test_every_error_type_has_a_template(self):
        for cls in (NDSError, *NDSError.__subclasses__()):
            assert cls.error_type in ERROR_MESSAGES
        assert NotInvertible('no inverse', 'surjective').flag == 'surjective'


class TestErrorContext:
    """Operation wrappers"""

    def test_message_and_propagation(self):
        context = ErrorContext('cli_check')
        with pytest.raises(BadParameter):
            with context:
                raise BadParameter('delta must be positive')
        assert context.error_message.startswith(ERROR_MESSAGES['bad_parameter'])
        assert context.error_message.endswith('delta must be positive')

    def test_io_errors(self):
        context = ErrorContext('cli_example')
        with pytest.raises(OSError):
            with context:
                raise FileNotFoundError('absent.json')
        assert context.error_message.startswith(ERROR_MESSAGES['io_error'])

    def test_success_leaves_no_message(self):
        with ErrorContext('cli_schema') as context:
            pass
        assert context.error_message is None

    def test_counters(self):
        for _ in range(3):
            with pytest.raises(BadParameter):
                with ErrorContext('cli_hits'):
                    raise BadParameter('T must be >= 1')
        assert error_handler.get_error_statistics() == {'bad_parameter_cli_hits': 3}
        assert error_summary()['total'] == 3


class TestEvents:
    """System event log lines"""

    def test_log_system_event(self, caplog):
        with caplog.at_level(logging.INFO, logger='system_events'):
            log_system_event('fixture run', 'triangular-3pt')
        assert 'System event: fixture run - triangular-3pt' in caplog.text

    def test_level_names(self, caplog):
        with caplog.at_level(logging.DEBUG, logger='system_events'):
            log_system_event('cache cleared', level='debug')
        assert caplog.records[-1].levelno == logging.DEBUG
