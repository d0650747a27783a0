"""Exact Hessian-basis certification for finite reflection groups."""
