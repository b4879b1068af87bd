"""Core business logic modules.""" 