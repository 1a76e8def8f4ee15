# Model package initialization
