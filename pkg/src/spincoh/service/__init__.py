"""FastAPI service wrapping the core package; the CLI shares its handlers."""
