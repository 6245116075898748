"""Self-similar groups, their matrix recursions, and automatic matrices over F_p."""
