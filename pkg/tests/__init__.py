"""Tests for ransomtrace."""
