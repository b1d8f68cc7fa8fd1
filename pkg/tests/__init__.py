"""Tests for the dense coding library, CLI and API."""
