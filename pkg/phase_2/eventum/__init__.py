"""phase_2.eventum package initializer."""
