"""phase_2.models package initializer."""
