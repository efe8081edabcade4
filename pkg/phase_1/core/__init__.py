"""phase_1.core package initializer."""
