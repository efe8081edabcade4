"""phase_3.cli package initializer."""
