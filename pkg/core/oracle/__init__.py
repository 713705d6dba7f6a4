"""
Reference oracles: comparator enumeration, brute-force mixtures and regret bounds.
"""
