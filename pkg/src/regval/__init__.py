"""regval: interactive synthesis of regex validations from example strings.

A validation is a regular expression plus integer conditions over its
capturing groups.  See `regval.orchestrator.run` for the programmatic entry
point, `regval.cli` for the command line, and `regval.service` for the HTTP
session API.
"""
