"""Scripts package."""

