# Blank init file for module
