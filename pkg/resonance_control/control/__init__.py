# Control package initialization
