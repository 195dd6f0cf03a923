"""Tests for the Balanced Vertex library, CLI and API."""
