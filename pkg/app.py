import logging

import click

from config import Config
from main import commands


def configure_logging(level=None):
    """Root logger on stderr; stdout is reserved for command output"""
    logging.basicConfig(level=level or Config.LOG_LEVEL, format=Config.LOG_FORMAT, force=True)


def create_app():
    @click.group('pencilk')
    @click.option('--verbose', is_flag=True, help='Log at DEBUG level.')
    def app(verbose):
        """Compound matrices, matrix pencils, Drazin inverses and difference-algebraic equations."""
        if verbose:
            logging.getLogger().setLevel(logging.DEBUG)

    configure_logging()

    # Register commands
    for command in commands:
        app.add_command(command)

    return app


app = create_app()

if __name__ == '__main__':
    app()
