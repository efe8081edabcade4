"""phase_3 package initializer."""
