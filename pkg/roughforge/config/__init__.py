"""
roughforge Configuration

Environment-driven settings (limits, construction defaults, tolerances, logging)
and the per-invocation RunConfig.
"""
