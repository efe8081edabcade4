"""phase_2 package initializer."""
