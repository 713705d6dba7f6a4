"""
Scenario generation, experiment execution and regret reporting.
"""
