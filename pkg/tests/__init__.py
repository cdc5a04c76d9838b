"""ClawSwarm test package."""
