# Export package initialization
