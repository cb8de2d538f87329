"""
Command-line surface for SigShape.
Contains the subcommand runner, settings layering, boxed reports and plots.
"""
