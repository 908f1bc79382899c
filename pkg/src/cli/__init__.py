"""
CLI Module - argument parsing, dispatch and result writers
"""

from .commands import RunConfig, build_parser, main, validate_config

__all__ = ['RunConfig', 'build_parser', 'main', 'validate_config']
