"""phase_1.algebra package initializer."""
