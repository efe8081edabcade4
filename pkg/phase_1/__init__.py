"""phase_1 package initializer."""
