"""phase_3.embed package initializer."""
