"""Utility modules.""" 