"""Test fixtures."""

