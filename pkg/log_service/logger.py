# log_service/logger.py

from typing import Optional, Dict, Any, TextIO
import sys
import os
import datetime
from logbook import Logger, StreamHandler, NullHandler
from container import container
from config.app_config import AppConfig, LoggingConfig


class LoggingService:
    """Service for centralized logging with component-specific configuration"""

    def __init__(self):
        self._initialized = False
        self._loggers: Dict[str, Logger] = {}
        self._console_handler: Optional[StreamHandler] = None
        self._null_handler: Optional[NullHandler] = None
        self._file: Optional[TextIO] = None
        self._config: Optional[LoggingConfig] = None

    @property
    def log_path(self) -> Optional[str]:
        if self._config is None:
            return None
        return os.path.join(self._config.log_directory, self._config.log_file)

    def initialize(self) -> None:
        """
        Initialize the logging service

        Raises:
            Exception: If the configuration is missing or the log file cannot be opened
        """
        if self._initialized:
            return

        try:
            app_config = container.resolve(AppConfig)
            self._config = app_config.logging

            os.makedirs(self._config.log_directory, exist_ok=True)
            self._file = open(self.log_path, "a", encoding="utf-8")

            # Swallow records of components that have console output disabled
            self._null_handler = NullHandler()
            self._null_handler.push_application()
            if self._config.console_output:
                self._console_handler = StreamHandler(sys.stderr, bubble=False,
                                                      filter=lambda record, handler: record.extra.get('console', True))
                self._console_handler.push_application()

            self._initialized = True

        except Exception as e:
            raise Exception(f"Failed to initialize logging: {str(e)}") from e

    def shutdown(self) -> None:
        """Pop handlers and close the log file"""
        if not self._initialized:
            return
        if self._console_handler is not None:
            self._console_handler.pop_application()
            self._console_handler = None
        if self._null_handler is not None:
            self._null_handler.pop_application()
            self._null_handler = None
        if self._file is not None:
            self._file.close()
            self._file = None
        self._loggers.clear()
        self._initialized = False

    def get_logger(self, component_name: str) -> Logger:
        """
        Get a logger for a specific component.

        Raises:
            Exception: If the component has no logging configuration
        """
        if not self._initialized:
            self.initialize()

        if component_name in self._loggers:
            return self._loggers[component_name]

        if self._config is None:
            raise Exception("Logging configuration not loaded")

        self._config.get_component_config(component_name)

        logger = Logger(component_name)
        self._loggers[component_name] = logger
        return logger

    def log(self, level: str, component: str, message: str, **kwargs: Any) -> None:
        """
        Log a message with the specified level and component.

        Args:
            level: One of DEBUG, INFO, WARNING, ERROR, CRITICAL
            component: Configured component name
            message: Text of the record
        """
        if not self._initialized:
            self.initialize()

        if self._config is None:
            raise Exception("Logging configuration not loaded")

        comp_config = self._config.get_component_config(component)
        if level not in comp_config['enabled_levels'] or level not in self._config.enabled_levels:
            return

        logger = self.get_logger(component)
        current_time = datetime.datetime.now().strftime('%H:%M:%S')

        color_code = self._config.color_scheme.get(level, '')
        reset_code = '\033[0m'
        console_msg = f"[{current_time}] - {color_code}[{level}]{reset_code} - {component} - {color_code}{message}{reset_code}"
        file_msg = f"[{current_time}] - [{level}] - {component} - {message}\n"

        if self._file:
            self._file.write(file_msg)
            self._file.flush()

        extra = {'console': bool(comp_config['console_output'])}
        if level == 'DEBUG':
            logger.debug(console_msg, extra=extra, **kwargs)
        elif level == 'INFO':
            logger.info(console_msg, extra=extra, **kwargs)
        elif level == 'WARNING':
            logger.warning(console_msg, extra=extra, **kwargs)
        elif level == 'ERROR':
            logger.error(console_msg, extra=extra, **kwargs)
        elif level == 'CRITICAL':
            logger.critical(console_msg, extra=extra, **kwargs)
