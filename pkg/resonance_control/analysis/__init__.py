# Analysis package initialization
