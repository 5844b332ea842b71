"""Bundled data assets (parity-check matrices under ``codes/``)."""
