"""Test modules.""" 