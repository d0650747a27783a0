"""Tests for coxhess."""
