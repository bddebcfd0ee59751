"""Tests for skeinlab_core package."""
