"""Group tables, relational groups and the example corpus."""
